"""Text proposal selection under a confidence threshold and text-feature flooding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DataError, DegenerateInputError
from .refine2d import RegionMask, SparseFeatureMap

# Best-performing thresholds per dataset family (tag -> delta).
DELTA_PROFILES = {
    "scannet200": 0.24,
    "matterport3d": 0.24,
    "replica": 0.26,
}
DEFAULT_DELTA = 0.24


@dataclass
class TextProposalSet:
    """Candidate text descriptions for one region, with their embeddings."""

    texts: list[str]
    embeddings: np.ndarray  # (T, C); T may be 0

    def __post_init__(self):
        e = np.asarray(self.embeddings, dtype=np.float64)
        if e.ndim != 2 and len(self.texts) > 0:
            raise DataError("embeddings must be (T, C)")
        if e.ndim == 2 and e.shape[0] != len(self.texts):
            raise DataError("one embedding per proposal text required")
        if e.size and not np.all(np.isfinite(e)):
            raise DataError("proposal embeddings must be finite")
        if len(self.texts) == 0:
            e = e.reshape(0, e.shape[-1] if e.ndim >= 1 and e.size else 0)
        self.embeddings = e

    def __len__(self) -> int:
        return len(self.texts)


@dataclass
class TextSelection:
    """Outcome of proposal selection; empty when nothing clears the threshold."""

    index: Optional[int] = None
    text: Optional[str] = None
    embedding: Optional[np.ndarray] = None
    score: Optional[float] = None

    @property
    def is_empty(self) -> bool:
        return self.index is None


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise DegenerateInputError("cosine similarity undefined for zero vectors")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def select_text(
    region_embedding: np.ndarray,
    proposals: TextProposalSet,
    delta: float = DEFAULT_DELTA,
) -> TextSelection:
    """Pick the cosine-argmax proposal, accepted only when its score exceeds delta.

    Ties break toward the lowest proposal index; an empty proposal list yields
    an empty selection.
    """
    if len(proposals) == 0:
        return TextSelection()
    scores = [cosine_similarity(proposals.embeddings[t], region_embedding) for t in range(len(proposals))]
    best = int(np.argmax(scores))  # argmax returns the first maximum
    if scores[best] <= delta:
        return TextSelection()
    return TextSelection(
        index=best,
        text=proposals.texts[best],
        embedding=proposals.embeddings[best].copy(),
        score=scores[best],
    )


def flood_text_features(selection: TextSelection, mask: RegionMask) -> SparseFeatureMap:
    """Broadcast the selected text embedding across the region mask.

    An empty selection contributes nothing: the result is undefined everywhere.
    """
    h, w = mask.mask.shape
    if selection.is_empty:
        c = len(mask.embedding)
        return SparseFeatureMap.empty(h, w, c)
    out = SparseFeatureMap.empty(h, w, len(selection.embedding))
    out.features[mask.mask] = selection.embedding
    out.count[mask.mask] = 1
    return out
