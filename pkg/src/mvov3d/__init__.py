"""mvov3d: training-free multi-view open-vocabulary 3D semantic segmentation.

Fuses multi-view 2D open-vocabulary pixel features onto 3D point clouds,
refines them with region masks, confidence-filtered text proposals, and
geometric superpoint priors, then assigns zero-shot semantic labels.
"""

from .errors import (
    ConfigurationError,
    DataError,
    DegenerateInputError,
    LoadError,
    MVOV3DError,
)
from .fusion import OcclusionPolicy, PointFeatureField, fuse_multiview, instance_visibility_fraction
from .geometry import (
    CameraModel,
    DepthMap,
    PointPixelMap,
    build_point_pixel_map,
    project_point,
    visibility_test,
)
from .merge import DenseFeatureMap, merge_pixel_features
from .pipeline import PipelineConfig, PipelineResult, compute_point_features, run_pipeline
from .query_eval import EvalReport, LabelSet, assign_labels, compute_confusion, compute_metrics, evaluate
from .refine1d import TextProposalSet, TextSelection, cosine_similarity, flood_text_features, select_text
from .refine2d import RegionMask, SparseFeatureMap, compose_region_maps, flood_region_features
from .scene import ScenePointCloud, ViewBundle
from .sceneio import load_labels, load_scene, save_labels, save_scene, validate_scene
from .superpoint import (
    PointAdjacencyGraph,
    SuperpointPartition,
    build_adjacency_graph,
    compute_superpoints,
    estimate_normals,
    pool_superpoints,
    segment_graph,
)
from .synthetic import SyntheticScene, SyntheticSpec, make_scene
from .tensorio import load_tensor, save_tensor

__version__ = "0.1.0"
