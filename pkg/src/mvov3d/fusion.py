"""Multi-view average pooling of pixel features onto 3D points."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DataError
from .geometry import DEFAULT_DEPTH_TOLERANCE, build_point_pixel_map
from .merge import DenseFeatureMap
from .scene import ScenePointCloud, ViewBundle


@dataclass
class PointFeatureField:
    """Per-point fused features with view-contribution counts."""

    features: np.ndarray  # (M, C)
    count: np.ndarray  # (M,) int

    @property
    def valid(self) -> np.ndarray:
        return self.count > 0

    @staticmethod
    def empty(num_points: int, channels: int) -> "PointFeatureField":
        return PointFeatureField(
            np.zeros((num_points, channels), dtype=np.float64),
            np.zeros(num_points, dtype=np.int64),
        )


@dataclass(frozen=True)
class OcclusionPolicy:
    """View admission rule for the occlusion stress diagnostic.

    ``use-all`` (the default pipeline) admits every visible correspondence and
    ignores the threshold. ``occluded-only`` admits a view for an instance only
    when that instance's visibility fraction in the view is below the threshold.
    """

    mode: str = "use-all"
    threshold: float = 1.0

    def __post_init__(self):
        if self.mode not in ("use-all", "occluded-only"):
            raise ConfigurationError(f"unknown occlusion mode {self.mode!r}")
        if not (0.0 <= self.threshold <= 1.0):
            raise ConfigurationError(f"occlusion threshold {self.threshold} outside [0, 1]")


def instance_visibility_fraction(
    cloud: ScenePointCloud,
    view: ViewBundle,
    instance_id: int,
    depth_tolerance: float = DEFAULT_DEPTH_TOLERANCE,
) -> float:
    """Fraction of an instance's points passing the visibility test in one view."""
    if cloud.instance_ids is None:
        raise ConfigurationError("cloud has no instance ids")
    member = cloud.instance_ids == instance_id
    n = int(member.sum())
    if n == 0:
        raise DataError(f"unknown or empty instance id {instance_id}")
    ppm = build_point_pixel_map(cloud.positions, view.camera, view.depth, depth_tolerance)
    visible = np.zeros(len(cloud), dtype=bool)
    visible[ppm.point_indices] = True
    return float((visible & member).sum() / n)


def _view_contribution(
    cloud: ScenePointCloud,
    view: ViewBundle,
    feature_map: DenseFeatureMap,
    policy: OcclusionPolicy,
    depth_tolerance: float,
    channels: int,
):
    """Partial (sum, count) arrays for one view's admitted correspondences."""
    total = np.zeros((len(cloud), channels), dtype=np.float64)
    count = np.zeros(len(cloud), dtype=np.int64)
    ppm = build_point_pixel_map(cloud.positions, view.camera, view.depth, depth_tolerance)
    if len(ppm) == 0:
        return total, count
    idx, rows, cols = ppm.point_indices, ppm.rows, ppm.cols
    if policy.mode == "occluded-only":
        if cloud.instance_ids is None:
            raise ConfigurationError("occluded-only policy requires instance ids")
        admit = np.zeros(len(idx), dtype=bool)
        inst_of = cloud.instance_ids[idx]
        for inst in np.unique(inst_of):
            frac = instance_visibility_fraction(cloud, view, int(inst), depth_tolerance)
            admit[inst_of == inst] = frac < policy.threshold
        idx, rows, cols = idx[admit], rows[admit], cols[admit]
    np.add.at(total, idx, feature_map.features[rows, cols])
    np.add.at(count, idx, 1)
    return total, count


def fuse_multiview(
    cloud: ScenePointCloud,
    views: list[ViewBundle],
    feature_maps: list[DenseFeatureMap],
    policy: OcclusionPolicy | None = None,
    depth_tolerance: float = DEFAULT_DEPTH_TOLERANCE,
    workers: int = 1,
) -> PointFeatureField:
    """Average improved pixel features over all admitted point-view correspondences.

    Accumulates in float64; per-view partial sums are merged in view order so
    the multi-worker path reproduces the sequential result.
    """
    if len(views) != len(feature_maps):
        raise ConfigurationError(
            f"{len(views)} views but {len(feature_maps)} feature maps"
        )
    if not views:
        raise ConfigurationError("fusion needs at least one view")
    channels = feature_maps[0].features.shape[2]
    for i, fm in enumerate(feature_maps):
        if fm.features.shape[2] != channels:
            raise ConfigurationError(f"feature map {i} channel mismatch")
        if not fm.valid.all():
            raise ConfigurationError(f"feature map {i} must be valid everywhere")
    policy = policy or OcclusionPolicy()

    def job(pair):
        view, fm = pair
        return _view_contribution(cloud, view, fm, policy, depth_tolerance, channels)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, zip(views, feature_maps)))
    else:
        parts = [job(p) for p in zip(views, feature_maps)]

    out = PointFeatureField.empty(len(cloud), channels)
    for total, count in parts:  # fixed merge order: view order
        out.features += total
        out.count += count
    fused = out.count > 0
    out.features[fused] /= out.count[fused, None]
    out.features[~fused] = 0.0
    return out
