"""End-to-end orchestration: 2D/1D refinement, multi-view fusion, superpoint
pooling, label assignment, and evaluation."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .fusion import OcclusionPolicy, PointFeatureField, fuse_multiview
from .geometry import DEFAULT_DEPTH_TOLERANCE
from .merge import DenseFeatureMap, merge_pixel_features
from .query_eval import EvalReport, LabelSet, assign_labels, evaluate
from .refine1d import DEFAULT_DELTA, flood_text_features, select_text
from .refine2d import SparseFeatureMap, compose_region_maps, flood_region_features
from .scene import ScenePointCloud, ViewBundle
from .superpoint import (
    DEFAULT_K_PARAM,
    DEFAULT_KNN,
    DEFAULT_MIN_SIZE,
    compute_superpoints,
    pool_superpoints,
)


@dataclass
class PipelineConfig:
    """Every knob of a pipeline run; serializable for run reproduction."""

    delta: float = DEFAULT_DELTA
    use_region: bool = True
    use_text: bool = True
    sp_enabled: bool = True
    sp_knn: int = DEFAULT_KNN
    sp_k_param: float = DEFAULT_K_PARAM
    sp_min_size: int = DEFAULT_MIN_SIZE
    occlusion_mode: str = "use-all"
    occlusion_threshold: float = 1.0
    depth_tolerance: float = DEFAULT_DEPTH_TOLERANCE
    workers: int = 1

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PipelineResult:
    point_features: PointFeatureField
    pred_labels: Optional[np.ndarray] = None
    report: Optional[EvalReport] = None


def improve_view_features(view: ViewBundle, config: PipelineConfig) -> DenseFeatureMap:
    """One view's refined per-pixel map: base averaged with region and text floods."""
    region_map: Optional[SparseFeatureMap] = None
    text_map: Optional[SparseFeatureMap] = None
    if config.use_region and view.regions:
        region_map = compose_region_maps([r for r in view.regions])
    if config.use_text and view.regions and view.proposals:
        floods = []
        for region, proposals in zip(view.regions, view.proposals):
            selection = select_text(region.embedding, proposals, delta=config.delta)
            floods.append(flood_text_features(selection, region))
        # overlapping selected masks average, mirroring the region composition
        text_map = _compose_sparse(floods)
    return merge_pixel_features(view.features, region_map, text_map)


def _compose_sparse(maps: list[SparseFeatureMap]) -> Optional[SparseFeatureMap]:
    defined_any = [m for m in maps if m.defined.any()]
    if not defined_any:
        return None
    h, w, c = defined_any[0].features.shape
    out = SparseFeatureMap.empty(h, w, c)
    for m in defined_any:
        d = m.defined
        out.features[d] += m.features[d]
        out.count[d] += m.count[d]
    covered = out.count > 0
    out.features[covered] /= out.count[covered, None]
    return out


def compute_point_features(
    cloud: ScenePointCloud,
    views: list[ViewBundle],
    config: Optional[PipelineConfig] = None,
) -> PointFeatureField:
    """Refinement + fusion + optional superpoint pooling, no label assignment."""
    config = config or PipelineConfig()
    improved = [improve_view_features(v, config) for v in views]
    policy = OcclusionPolicy(config.occlusion_mode, config.occlusion_threshold)
    fused = fuse_multiview(
        cloud,
        views,
        improved,
        policy=policy,
        depth_tolerance=config.depth_tolerance,
        workers=config.workers,
    )
    if config.sp_enabled:
        partition = compute_superpoints(
            cloud,
            k=config.sp_knn,
            k_param=config.sp_k_param,
            min_size=config.sp_min_size,
        )
        fused = pool_superpoints(fused, partition)
    return fused


def run_pipeline(
    cloud: ScenePointCloud,
    views: list[ViewBundle],
    labels: Optional[LabelSet] = None,
    config: Optional[PipelineConfig] = None,
) -> PipelineResult:
    """Full pipeline; assigns labels when a label set is given and evaluates
    when the cloud carries ground truth."""
    config = config or PipelineConfig()
    features = compute_point_features(cloud, views, config)
    result = PipelineResult(point_features=features)
    if labels is not None:
        result.pred_labels = assign_labels(features, labels)
        if cloud.labels is not None:
            result.report = evaluate(result.pred_labels, cloud.labels, labels)
    return result
