"""In-memory scene containers: point cloud and per-view bundles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .geometry import CameraModel, DepthMap
from .merge import DenseFeatureMap
from .refine1d import TextProposalSet
from .refine2d import RegionMask


@dataclass
class ScenePointCloud:
    """M points with positions and optional normals, labels, and instance ids."""

    positions: np.ndarray  # (M, 3)
    normals: Optional[np.ndarray] = None  # (M, 3) unit vectors
    labels: Optional[np.ndarray] = None  # (M,) int, ground truth
    instance_ids: Optional[np.ndarray] = None  # (M,) int

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=np.float64)
        if p.ndim != 2 or p.shape[1] != 3:
            raise ConfigurationError("positions must be (M, 3)")
        if not np.all(np.isfinite(p)):
            raise ConfigurationError("positions must be finite")
        self.positions = p
        for name in ("normals", "labels", "instance_ids"):
            v = getattr(self, name)
            if v is None:
                continue
            v = np.asarray(v)
            if v.shape[0] != len(p):
                raise ConfigurationError(f"{name} length {v.shape[0]} != point count {len(p)}")
            setattr(self, name, v)
        if self.normals is not None:
            self.normals = np.asarray(self.normals, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.positions)


@dataclass
class ViewBundle:
    """One posed RGB-D view: camera, depth, dense features, regions, proposals."""

    image_id: str
    camera: CameraModel
    depth: DepthMap
    features: DenseFeatureMap
    regions: list[RegionMask] = field(default_factory=list)
    proposals: list[TextProposalSet] = field(default_factory=list)  # one per region

    def __post_init__(self):
        h, w = self.camera.height, self.camera.width
        if self.depth.values.shape != (h, w):
            raise ConfigurationError(f"view {self.image_id}: depth shape mismatch")
        if self.features.features.shape[:2] != (h, w):
            raise ConfigurationError(f"view {self.image_id}: feature map shape mismatch")
        if self.proposals and len(self.proposals) != len(self.regions):
            raise ConfigurationError(
                f"view {self.image_id}: {len(self.proposals)} proposal sets "
                f"for {len(self.regions)} regions"
            )
        for i, r in enumerate(self.regions):
            if r.mask.shape != (h, w):
                raise ConfigurationError(f"view {self.image_id}: region {i} mask shape mismatch")

    @property
    def feature_dim(self) -> int:
        return self.features.features.shape[2]
