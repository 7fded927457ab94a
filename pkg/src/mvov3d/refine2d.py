"""Per-pixel region feature maps: propagate region embeddings across binary masks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DataError


@dataclass(frozen=True)
class RegionMask:
    """A binary 2D mask with the embedding of its isolated image region."""

    mask: np.ndarray  # (H, W) bool
    embedding: np.ndarray  # (C,)
    confidence: float = 1.0

    def __post_init__(self):
        m = np.asarray(self.mask).astype(bool)
        e = np.asarray(self.embedding, dtype=np.float64)
        if m.ndim != 2:
            raise ConfigurationError("mask must be 2D")
        if not m.any():
            raise DataError("region mask has no set pixels")
        if e.ndim != 1 or not np.all(np.isfinite(e)):
            raise DataError("region embedding must be a finite 1D vector")
        if not (0.0 <= self.confidence <= 1.0):
            raise DataError(f"confidence {self.confidence} outside [0, 1]")
        object.__setattr__(self, "mask", m)
        object.__setattr__(self, "embedding", e)


@dataclass
class SparseFeatureMap:
    """Per-pixel features defined only where count >= 1."""

    features: np.ndarray  # (H, W, C)
    count: np.ndarray  # (H, W) int, 0 means undefined

    @staticmethod
    def empty(height: int, width: int, channels: int) -> "SparseFeatureMap":
        return SparseFeatureMap(
            np.zeros((height, width, channels), dtype=np.float64),
            np.zeros((height, width), dtype=np.int64),
        )

    @property
    def defined(self) -> np.ndarray:
        return self.count > 0


def flood_region_features(region: RegionMask) -> SparseFeatureMap:
    """Broadcast the region embedding to every set pixel of its mask."""
    h, w = region.mask.shape
    c = len(region.embedding)
    out = SparseFeatureMap.empty(h, w, c)
    out.features[region.mask] = region.embedding
    out.count[region.mask] = 1
    return out


def compose_region_maps(regions: list[RegionMask]) -> SparseFeatureMap:
    """Average the embeddings of all regions covering each pixel.

    Accumulation runs in list order so overlapping-region sums are reproducible.
    Requires at least one region (shape is taken from the first mask).
    """
    if not regions:
        raise ConfigurationError("compose_region_maps needs at least one region")
    h, w = regions[0].mask.shape
    c = len(regions[0].embedding)
    for i, r in enumerate(regions):
        if r.mask.shape != (h, w) or len(r.embedding) != c:
            raise ConfigurationError(f"region {i} shape disagrees with region 0")
    out = SparseFeatureMap.empty(h, w, c)
    for r in regions:
        out.features[r.mask] += r.embedding
        out.count[r.mask] += 1
    covered = out.count > 0
    out.features[covered] /= out.count[covered, None]
    return out
