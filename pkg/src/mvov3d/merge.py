"""Indicator-weighted averaging of base, region, and text per-pixel features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .refine2d import SparseFeatureMap


@dataclass
class DenseFeatureMap:
    """H x W x C feature map with an explicit per-pixel validity flag."""

    features: np.ndarray  # (H, W, C)
    valid: np.ndarray  # (H, W) bool

    def __post_init__(self):
        f = np.asarray(self.features, dtype=np.float64)
        v = np.asarray(self.valid).astype(bool)
        if f.ndim != 3 or v.shape != f.shape[:2]:
            raise ConfigurationError("features must be (H, W, C) with matching validity")
        if not np.all(np.isfinite(f)):
            raise ConfigurationError("dense feature map contains non-finite values")
        self.features = f
        self.valid = v

    @staticmethod
    def full(features: np.ndarray) -> "DenseFeatureMap":
        features = np.asarray(features, dtype=np.float64)
        return DenseFeatureMap(features, np.ones(features.shape[:2], dtype=bool))


def merge_pixel_features(
    base: DenseFeatureMap,
    region: SparseFeatureMap | None,
    text: SparseFeatureMap | None,
) -> DenseFeatureMap:
    """Per pixel, average the defined contributors among base, region, and text.

    The base map must be valid at every pixel, so the denominator is never
    zero; definedness is the explicit validity/count flag, not a zero test.
    Passing None for region or text drops that contributor entirely.
    """
    if not base.valid.all():
        raise ConfigurationError("base feature map must be valid at every pixel")
    shape = base.features.shape
    total = base.features.astype(np.float64).copy()
    count = np.ones(shape[:2], dtype=np.float64)
    for contrib in (region, text):
        if contrib is None:
            continue
        if contrib.features.shape != shape:
            raise ConfigurationError(
                f"contributor shape {contrib.features.shape} does not match base {shape}"
            )
        defined = contrib.defined
        total[defined] += contrib.features[defined]
        count[defined] += 1
    merged = total / count[:, :, None]
    return DenseFeatureMap(merged, np.ones(shape[:2], dtype=bool))
