"""Deterministic synthetic scenes for testing: planar clouds, rendered depth,
noisy pixel features, instance region masks, and text proposals."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import CameraModel, DepthMap, project_points
from .merge import DenseFeatureMap
from .query_eval import LabelSet
from .refine1d import TextProposalSet
from .refine2d import RegionMask
from .scene import ScenePointCloud, ViewBundle


@dataclass
class SyntheticSpec:
    """Parameters of a generated scene.

    Each plane is one instance of one class. Class embeddings are orthonormal
    basis vectors (plus one extra channel reserved for the background), so a
    noise-free run recovers labels exactly.
    """

    num_planes: int = 3
    points_per_plane: int = 100
    num_views: int = 3
    noise_sigma: float = 0.0
    occluders: int = 0
    image_height: int = 48
    image_width: int = 64
    plane_extent: float = 1.0
    distractor_texts: int = 2
    # nonzero: per-pixel noise scaled by (1 - instance visibility fraction)
    occlusion_noise_scale: float = 0.0


@dataclass
class SyntheticScene:
    cloud: ScenePointCloud
    views: list[ViewBundle]
    labels: LabelSet


_PLANE_NAMES = ["floor", "wall", "table", "ceiling", "door", "shelf", "screen", "panel"]
_DISTRACTORS = ["cat", "cloud", "bicycle", "guitar", "teapot"]


def _plane_basis(axis: int):
    """In-plane basis vectors and outward normal for one of 3 orientations."""
    normal = np.zeros(3)
    normal[axis] = 1.0
    u = np.zeros(3)
    u[(axis + 1) % 3] = 1.0
    v = np.cross(normal, u)
    return u, v, normal


def make_scene(seed: int, spec: Optional[SyntheticSpec] = None) -> SyntheticScene:
    """Build an in-memory scene, deterministic in the seed."""
    spec = spec or SyntheticSpec()
    rng = np.random.default_rng(seed)
    channels = spec.num_planes + 1  # +1 for the background class
    class_emb = np.eye(channels, dtype=np.float64)

    positions, normals, labels, instances = [], [], [], []
    centers = []
    for p in range(spec.num_planes):
        axis = p % 3
        u, v, n = _plane_basis(axis)
        # spread plane centers apart so k-NN graphs never bridge planes
        center = np.zeros(3)
        center[axis] = -2.0 - 1.5 * p
        center += 0.3 * rng.standard_normal(3) * 0  # placement is deterministic
        centers.append(center)
        side = int(np.ceil(np.sqrt(spec.points_per_plane)))
        g = np.linspace(-spec.plane_extent, spec.plane_extent, side)
        uu, vv = np.meshgrid(g, g)
        pts = center + uu.reshape(-1, 1) * u + vv.reshape(-1, 1) * v
        pts = pts[: spec.points_per_plane]
        positions.append(pts)
        normals.append(np.tile(n, (len(pts), 1)))
        labels.append(np.full(len(pts), p, dtype=np.int64))
        instances.append(np.full(len(pts), p, dtype=np.int64))

    occluder_pts = []
    for o in range(spec.occluders):
        # small plane between the cameras and target plane o
        axis = o % 3
        u, v, n = _plane_basis(axis)
        center = np.array(centers[o % spec.num_planes], copy=True)
        center[axis] += 1.0  # halfway toward the camera
        side = 8
        g = np.linspace(-0.4 * spec.plane_extent, 0.4 * spec.plane_extent, side)
        uu, vv = np.meshgrid(g, g)
        pts = center + uu.reshape(-1, 1) * u + vv.reshape(-1, 1) * v
        occluder_pts.append((pts, n))

    all_pos = np.concatenate(positions)
    all_nrm = np.concatenate(normals)
    all_lbl = np.concatenate(labels)
    all_ins = np.concatenate(instances)
    # occluders are labeled background and excluded from evaluation interest
    for i, (pts, n) in enumerate(occluder_pts):
        all_pos = np.concatenate([all_pos, pts])
        all_nrm = np.concatenate([all_nrm, np.tile(n, (len(pts), 1))])
        all_lbl = np.concatenate([all_lbl, np.full(len(pts), spec.num_planes, dtype=np.int64)])
        all_ins = np.concatenate([all_ins, np.full(len(pts), spec.num_planes + i, dtype=np.int64)])

    cloud = ScenePointCloud(all_pos, normals=all_nrm, labels=all_lbl, instance_ids=all_ins)

    views = [
        _render_view(cloud, spec, class_emb, centers, view_index=i, rng=rng)
        for i in range(spec.num_views)
    ]

    names = [_PLANE_NAMES[p % len(_PLANE_NAMES)] + (str(p // len(_PLANE_NAMES)) if p >= len(_PLANE_NAMES) else "") for p in range(spec.num_planes)]
    names.append("background")
    label_set = LabelSet(names=names, embeddings=class_emb)
    return SyntheticScene(cloud=cloud, views=views, labels=label_set)


def make_occlusion_sweep_scene(seed: int, noise_scale: float = 1.2) -> SyntheticScene:
    """Single-plane scene whose views see graded fractions of the plane.

    Camera offsets are chosen so the per-view visibility fractions of the one
    instance land near {0.95, 0.65, 0.55, 0.45, 0.35}; per-view feature noise
    scales with (1 - fraction), i.e. barely-visible views are the noisiest.
    """
    rng = np.random.default_rng(seed)
    h, w = 48, 64
    f = 0.9 * w
    side = 20
    g = np.linspace(-1.0, 1.0, side)
    uu, vv = np.meshgrid(g, g)
    pts = np.stack([uu.ravel(), vv.ravel(), np.full(side * side, 3.0)], axis=1)
    m = len(pts)
    cloud = ScenePointCloud(
        pts,
        normals=np.tile([0.0, 0.0, 1.0], (m, 1)),
        labels=np.zeros(m, dtype=np.int64),
        instance_ids=np.zeros(m, dtype=np.int64),
    )
    class_emb = np.eye(2)  # plane class + background

    views = []
    for vi, dy in enumerate([0.35, 0.95, 1.15, 1.35, 1.55]):
        K = np.array([[f, 0.0, w / 2.0], [0.0, f, h / 2.0], [0.0, 0.0, 1.0]])
        E = np.eye(4)
        E[1, 3] = -dy  # shift the camera up; part of the plane leaves the frustum
        camera = CameraModel(K, E, w, h)

        rows, cols, z, ok = project_points(cloud.positions, camera)
        depth = np.zeros((h, w))
        winner = np.full((h, w), -1, dtype=np.int64)
        for i in np.argsort(z, kind="stable")[::-1]:
            if ok[i]:
                depth[rows[i], cols[i]] = z[i]
                winner[rows[i], cols[i]] = i

        frac = ok.sum() / m
        sigma = noise_scale * (1.0 - frac)
        features = np.tile(class_emb[1], (h, w, 1))
        hit = winner >= 0
        features[hit] = class_emb[0]
        features += sigma * rng.standard_normal((h, w, 2))

        views.append(
            ViewBundle(
                image_id=f"view{vi:03d}",
                camera=camera,
                depth=DepthMap(depth),
                features=DenseFeatureMap.full(features),
            )
        )

    labels = LabelSet(names=["plane", "background"], embeddings=class_emb)
    return SyntheticScene(cloud=cloud, views=views, labels=labels)


def _camera_for_view(spec: SyntheticSpec, centers, view_index: int) -> CameraModel:
    """Look-at camera aimed at one plane center from along its normal."""
    target = np.asarray(centers[view_index % len(centers)], dtype=np.float64)
    axis = (view_index % len(centers)) % 3
    eye = target.copy()
    eye[axis] += 3.0
    eye[(axis + 1) % 3] += 0.4 * (view_index % 3 - 1)

    forward = target - eye
    forward /= np.linalg.norm(forward)
    up_hint = np.array([0.0, 1.0, 0.0]) if abs(forward[1]) < 0.9 else np.array([1.0, 0.0, 0.0])
    right = np.cross(forward, up_hint)
    right /= np.linalg.norm(right)
    down = np.cross(forward, right)
    R = np.stack([right, down, forward])  # world-to-camera rotation rows
    t = -R @ eye
    E = np.eye(4)
    E[:3, :3] = R
    E[:3, 3] = t

    f = 0.9 * spec.image_width
    K = np.array(
        [
            [f, 0.0, spec.image_width / 2.0],
            [0.0, f, spec.image_height / 2.0],
            [0.0, 0.0, 1.0],
        ]
    )
    return CameraModel(K, E, spec.image_width, spec.image_height)


def _render_view(cloud, spec, class_emb, centers, view_index, rng) -> ViewBundle:
    camera = _camera_for_view(spec, centers, view_index)
    h, w = spec.image_height, spec.image_width
    channels = class_emb.shape[0]

    rows, cols, z, ok = project_points(cloud.positions, camera)
    depth = np.zeros((h, w))
    winner = np.full((h, w), -1, dtype=np.int64)  # point index per pixel
    order = np.argsort(z, kind="stable")[::-1]  # far to near; near overwrites
    for i in order:
        if ok[i]:
            depth[rows[i], cols[i]] = z[i]
            winner[rows[i], cols[i]] = i

    # base VLM features: true class embedding at geometry pixels, background elsewhere
    features = np.tile(class_emb[-1], (h, w, 1))
    hit = winner >= 0
    features[hit] = class_emb[cloud.labels[winner[hit]]]

    if spec.occlusion_noise_scale > 0:
        # noisier features for instances barely visible in this view
        visible_counts = np.bincount(
            cloud.instance_ids[winner[hit]], minlength=cloud.instance_ids.max() + 1
        )
        totals = np.bincount(cloud.instance_ids, minlength=cloud.instance_ids.max() + 1)
        frac = np.where(totals > 0, visible_counts / totals, 0.0)
        sigma_map = spec.occlusion_noise_scale * (1.0 - frac[cloud.instance_ids[winner[hit]]])
        features[hit] += sigma_map[:, None] * rng.standard_normal((int(hit.sum()), channels))
    if spec.noise_sigma > 0:
        features += spec.noise_sigma * rng.standard_normal((h, w, channels))

    regions: list[RegionMask] = []
    proposals: list[TextProposalSet] = []
    for inst in np.unique(cloud.instance_ids[winner[hit]]):
        mask = np.zeros((h, w), dtype=bool)
        mask[hit] = cloud.instance_ids[winner[hit]] == inst
        if not mask.any():
            continue
        lbl = int(cloud.labels[np.nonzero(cloud.instance_ids == inst)[0][0]])
        regions.append(RegionMask(mask=mask, embedding=class_emb[lbl], confidence=1.0))
        texts = [f"class{lbl}"]
        embs = [class_emb[lbl]]
        for d in range(spec.distractor_texts):
            texts.append(_DISTRACTORS[d % len(_DISTRACTORS)])
            other = (lbl + 1 + d) % channels
            embs.append(class_emb[other])
        proposals.append(TextProposalSet(texts=texts, embeddings=np.array(embs)))

    return ViewBundle(
        image_id=f"view{view_index:03d}",
        camera=camera,
        depth=DepthMap(depth),
        features=DenseFeatureMap.full(features),
        regions=regions,
        proposals=proposals,
    )
