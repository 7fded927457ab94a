"""On-disk scene interchange: JSON manifest plus binary tensor files."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import LoadError
from .geometry import CameraModel, DepthMap
from .merge import DenseFeatureMap
from .query_eval import LabelSet
from .refine1d import TextProposalSet
from .refine2d import RegionMask
from .scene import ScenePointCloud, ViewBundle
from .synthetic import SyntheticScene
from .tensorio import load_tensor, save_tensor

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1


def save_scene(scene: SyntheticScene, out_dir: str | Path, scene_id: str = "scene") -> Path:
    """Write a full scene (cloud, views, labels) as an interchange directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cloud, views = scene.cloud, scene.views
    feature_dim = views[0].feature_dim if views else scene.labels.embeddings.shape[1]

    save_tensor(out / "points.bin", cloud.positions.astype(np.float32))
    cloud_entry = {"points": "points.bin"}
    if cloud.normals is not None:
        save_tensor(out / "normals.bin", cloud.normals.astype(np.float32))
        cloud_entry["normals"] = "normals.bin"
    if cloud.labels is not None:
        save_tensor(out / "gt_labels.bin", cloud.labels.astype(np.int32))
        cloud_entry["labels"] = "gt_labels.bin"
    if cloud.instance_ids is not None:
        save_tensor(out / "gt_instances.bin", cloud.instance_ids.astype(np.int32))
        cloud_entry["instances"] = "gt_instances.bin"

    view_entries = []
    for view in views:
        vid = view.image_id
        save_tensor(out / f"{vid}_depth.bin", view.depth.values.astype(np.float32))
        save_tensor(out / f"{vid}_features.bin", view.features.features.astype(np.float32))
        entry = {
            "image_id": vid,
            "camera": {
                "intrinsics": view.camera.intrinsics.flatten().tolist(),
                "extrinsics": view.camera.extrinsics.flatten().tolist(),
                "width": view.camera.width,
                "height": view.camera.height,
            },
            "depth_file": f"{vid}_depth.bin",
            "feature_file": f"{vid}_features.bin",
        }
        if view.regions:
            masks = np.stack([r.mask for r in view.regions]).astype(np.uint8)
            embs = np.stack([r.embedding for r in view.regions]).astype(np.float32)
            confs = np.array([r.confidence for r in view.regions], dtype=np.float32)
            save_tensor(out / f"{vid}_masks.bin", masks)
            save_tensor(out / f"{vid}_region_embeddings.bin", embs)
            save_tensor(out / f"{vid}_region_confidences.bin", confs)
            entry["region_masks_file"] = f"{vid}_masks.bin"
            entry["region_embeddings_file"] = f"{vid}_region_embeddings.bin"
            entry["region_confidences_file"] = f"{vid}_region_confidences.bin"
        if view.proposals:
            props = [
                [
                    {"text": t, "embedding": [float(x) for x in e]}
                    for t, e in zip(ps.texts, ps.embeddings)
                ]
                for ps in view.proposals
            ]
            (out / f"{vid}_text_proposals.json").write_text(json.dumps(props))
            entry["text_proposals_file"] = f"{vid}_text_proposals.json"
        view_entries.append(entry)

    manifest = {
        "format_version": MANIFEST_VERSION,
        "scene_id": scene_id,
        "feature_dim": int(feature_dim),
        "point_cloud": cloud_entry,
        "views": view_entries,
    }
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n")

    save_labels(scene.labels, out / "labels.json")
    return out / MANIFEST_NAME


def save_labels(labels: LabelSet, path: str | Path) -> None:
    doc = {
        "names": labels.names,
        "embeddings": [[float(x) for x in row] for row in labels.embeddings],
        "ignore_id": labels.ignore_id,
    }
    if labels.buckets is not None:
        doc["buckets"] = labels.buckets
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_labels(path: str | Path) -> LabelSet:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LoadError(f"{path}: cannot parse label set ({exc})") from exc
    return LabelSet(
        names=list(doc["names"]),
        embeddings=np.asarray(doc["embeddings"], dtype=np.float64),
        buckets=doc.get("buckets"),
        ignore_id=int(doc.get("ignore_id", -1)),
    )


def _load_required(directory: Path, name: str, what: str) -> np.ndarray:
    path = directory / name
    if not path.exists():
        raise LoadError(f"{path}: missing {what} file referenced by manifest")
    return load_tensor(path)


def load_scene(manifest_path: str | Path):
    """Load and fully validate an interchange scene.

    Returns (ScenePointCloud, list[ViewBundle]). Every referenced file must
    exist, parse, and agree on the scene-wide feature dimension.
    """
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / MANIFEST_NAME
    try:
        manifest = json.loads(manifest_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LoadError(f"{manifest_path}: cannot parse manifest ({exc})") from exc
    if manifest.get("format_version") != MANIFEST_VERSION:
        raise LoadError(
            f"{manifest_path}: unsupported format version {manifest.get('format_version')}"
        )
    root = manifest_path.parent
    feature_dim = int(manifest["feature_dim"])

    pc = manifest["point_cloud"]
    positions = _load_required(root, pc["points"], "point cloud")
    normals = _load_required(root, pc["normals"], "normals") if "normals" in pc else None
    labels = _load_required(root, pc["labels"], "labels") if "labels" in pc else None
    instances = _load_required(root, pc["instances"], "instances") if "instances" in pc else None
    try:
        cloud = ScenePointCloud(positions, normals=normals, labels=labels, instance_ids=instances)
    except Exception as exc:
        raise LoadError(f"{manifest_path}: invalid point cloud ({exc})") from exc

    views = []
    for entry in manifest["views"]:
        vid = entry["image_id"]
        cam = entry["camera"]
        try:
            camera = CameraModel(
                np.asarray(cam["intrinsics"], dtype=np.float64).reshape(3, 3),
                np.asarray(cam["extrinsics"], dtype=np.float64).reshape(4, 4),
                int(cam["width"]),
                int(cam["height"]),
            )
        except Exception as exc:
            raise LoadError(f"{manifest_path}: view {vid}: bad camera ({exc})") from exc
        depth = _load_required(root, entry["depth_file"], "depth")
        features = _load_required(root, entry["feature_file"], "feature")
        if features.ndim != 3 or features.shape[2] != feature_dim:
            raise LoadError(
                f"{root / entry['feature_file']}: feature dim "
                f"{features.shape[2] if features.ndim == 3 else '?'} != scene-wide {feature_dim}"
            )

        regions: list[RegionMask] = []
        if "region_masks_file" in entry:
            masks = _load_required(root, entry["region_masks_file"], "region mask")
            embs = _load_required(root, entry["region_embeddings_file"], "region embedding")
            confs = _load_required(root, entry["region_confidences_file"], "region confidence")
            if embs.shape[1] != feature_dim:
                raise LoadError(
                    f"{root / entry['region_embeddings_file']}: embedding dim "
                    f"{embs.shape[1]} != scene-wide {feature_dim}"
                )
            if not (len(masks) == len(embs) == len(confs)):
                raise LoadError(f"{manifest_path}: view {vid}: region file lengths disagree")
            for s in range(len(masks)):
                try:
                    regions.append(
                        RegionMask(masks[s].astype(bool), embs[s], float(confs[s]))
                    )
                except Exception as exc:
                    raise LoadError(
                        f"{root / entry['region_masks_file']}: region {s} invalid ({exc})"
                    ) from exc

        proposals: list[TextProposalSet] = []
        if "text_proposals_file" in entry:
            ppath = root / entry["text_proposals_file"]
            if not ppath.exists():
                raise LoadError(f"{ppath}: missing text-proposal file")
            try:
                raw = json.loads(ppath.read_text())
            except json.JSONDecodeError as exc:
                raise LoadError(f"{ppath}: cannot parse ({exc})") from exc
            for s, plist in enumerate(raw):
                texts = [p["text"] for p in plist]
                embs = np.asarray([p["embedding"] for p in plist], dtype=np.float64)
                if embs.size and embs.shape[1] != feature_dim:
                    raise LoadError(f"{ppath}: region {s} embedding dim != {feature_dim}")
                proposals.append(TextProposalSet(texts=texts, embeddings=embs))
            if len(proposals) != len(regions):
                raise LoadError(
                    f"{ppath}: {len(proposals)} proposal sets for {len(regions)} regions"
                )

        try:
            views.append(
                ViewBundle(
                    image_id=vid,
                    camera=camera,
                    depth=DepthMap(depth.astype(np.float64)),
                    features=DenseFeatureMap.full(features.astype(np.float64)),
                    regions=regions,
                    proposals=proposals,
                )
            )
        except Exception as exc:
            raise LoadError(f"{manifest_path}: view {vid} invalid ({exc})") from exc

    return cloud, views


def validate_scene(manifest_path: str | Path) -> list[str]:
    """Load a scene purely for validation; returns a list of problems (empty = ok)."""
    try:
        load_scene(manifest_path)
    except LoadError as exc:
        return [str(exc)]
    return []
