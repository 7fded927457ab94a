"""Zero-shot label assignment by cosine argmax and segmentation metrics."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DataError
from .fusion import PointFeatureField

IGNORE_LABEL = -1
BUCKETS = ("head", "common", "tail")


@dataclass
class LabelSet:
    """Open-vocabulary class names with their text embeddings."""

    names: list[str]
    embeddings: np.ndarray  # (L, C)
    buckets: Optional[dict[str, str]] = None  # name -> head|common|tail
    ignore_id: int = IGNORE_LABEL

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise DataError("label names must be unique")
        e = np.asarray(self.embeddings, dtype=np.float64)
        if e.ndim != 2 or e.shape[0] != len(self.names):
            raise ConfigurationError("embeddings must be (L, C) with one row per name")
        if not np.all(np.isfinite(e)):
            raise DataError("label embeddings must be finite")
        if np.any(np.linalg.norm(e, axis=1) == 0):
            raise DataError("label embeddings must be nonzero")
        if self.buckets is not None:
            bad = set(self.buckets.values()) - set(BUCKETS)
            if bad:
                raise DataError(f"unknown bucket names {sorted(bad)}")
        self.embeddings = e

    def __len__(self) -> int:
        return len(self.names)


@dataclass
class EvalReport:
    """Per-class and aggregate segmentation metrics, all in [0, 1]."""

    class_ids: list[int]  # classes present in ground truth
    class_iou: dict[int, float]
    class_acc: dict[int, float]
    miou: float
    macc: float
    bucket_miou: dict[str, float] = field(default_factory=dict)
    bucket_macc: dict[str, float] = field(default_factory=dict)
    unlabeled_points: int = 0

    def write_csv(self, path, names: Optional[list[str]] = None) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["class_id", "class_name", "iou", "accuracy"])
            for cid in self.class_ids:
                name = names[cid] if names else str(cid)
                writer.writerow([cid, name, f"{self.class_iou[cid]:.6f}", f"{self.class_acc[cid]:.6f}"])

    def write_summary(self, path) -> None:
        summary = {
            "miou": self.miou,
            "macc": self.macc,
            "bucket_miou": self.bucket_miou,
            "bucket_macc": self.bucket_macc,
            "num_classes": len(self.class_ids),
            "unlabeled_points": self.unlabeled_points,
        }
        Path(path).write_text(json.dumps(summary, indent=2) + "\n")


def assign_labels(field_: PointFeatureField, labels: LabelSet) -> np.ndarray:
    """Argmax-cosine label per valid point; invalid points get the ignore id.

    Ties break toward the lowest label index.
    """
    if field_.features.shape[1] != labels.embeddings.shape[1]:
        raise ConfigurationError(
            f"feature dim {field_.features.shape[1]} != label embedding dim "
            f"{labels.embeddings.shape[1]}"
        )
    out = np.full(len(field_.count), labels.ignore_id, dtype=np.int64)
    valid = field_.valid
    if not valid.any():
        return out
    feats = field_.features[valid]
    norms = np.linalg.norm(feats, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    label_norms = np.linalg.norm(labels.embeddings, axis=1, keepdims=True)
    sims = (feats / norms) @ (labels.embeddings / label_norms).T
    out[valid] = np.argmax(sims, axis=1)
    return out


def compute_confusion(
    pred: np.ndarray, gt: np.ndarray, num_classes: int, ignore_id: int = IGNORE_LABEL
) -> np.ndarray:
    """L x L counts (rows = gt, cols = pred) over points with non-ignore gt.

    Predicted-ignore points (e.g. unlabeled after fusion) count as misses: they
    land in no prediction column, so they inflate FN but never TP.
    """
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    if pred.shape != gt.shape:
        raise ConfigurationError("pred and gt must have equal length")
    keep = gt != ignore_id
    pred, gt = pred[keep], gt[keep]
    if np.any((gt < 0) | (gt >= num_classes)):
        raise DataError("ground-truth label out of range")
    if np.any((pred >= num_classes) | ((pred < 0) & (pred != ignore_id))):
        raise DataError("predicted label out of range")
    confusion = np.zeros((num_classes, num_classes), dtype=np.int64)
    scored = pred != ignore_id
    np.add.at(confusion, (gt[scored], pred[scored]), 1)
    # ignore predictions: row total must still include them (as FN)
    miss = np.bincount(gt[~scored], minlength=num_classes)
    return confusion, miss


def compute_metrics(
    confusion: np.ndarray,
    miss: Optional[np.ndarray] = None,
    bucket_of: Optional[dict[int, str]] = None,
) -> EvalReport:
    """Per-class IoU/accuracy and their means over classes present in gt.

    ``miss`` holds per-class counts of points whose prediction was the ignore
    label; they add to FN only.
    """
    confusion = np.asarray(confusion, dtype=np.int64)
    n = confusion.shape[0]
    if miss is None:
        miss = np.zeros(n, dtype=np.int64)
    tp = np.diag(confusion).astype(np.float64)
    gt_total = confusion.sum(axis=1) + miss  # TP + FN
    pred_total = confusion.sum(axis=0)  # TP + FP
    present = gt_total > 0

    class_ids = [int(i) for i in np.nonzero(present)[0]]
    class_iou, class_acc = {}, {}
    for cid in class_ids:
        denom = gt_total[cid] + pred_total[cid] - tp[cid]
        class_iou[cid] = float(tp[cid] / denom) if denom > 0 else 0.0
        class_acc[cid] = float(tp[cid] / gt_total[cid])

    miou = float(np.mean([class_iou[c] for c in class_ids])) if class_ids else 0.0
    macc = float(np.mean([class_acc[c] for c in class_ids])) if class_ids else 0.0

    bucket_miou, bucket_macc = {}, {}
    if bucket_of:
        for bucket in BUCKETS:
            members = [c for c in class_ids if bucket_of.get(c) == bucket]
            if members:
                bucket_miou[bucket] = float(np.mean([class_iou[c] for c in members]))
                bucket_macc[bucket] = float(np.mean([class_acc[c] for c in members]))

    return EvalReport(
        class_ids=class_ids,
        class_iou=class_iou,
        class_acc=class_acc,
        miou=miou,
        macc=macc,
        bucket_miou=bucket_miou,
        bucket_macc=bucket_macc,
        unlabeled_points=int(miss.sum()),
    )


def evaluate(
    pred: np.ndarray,
    gt: np.ndarray,
    labels: LabelSet,
) -> EvalReport:
    """Confusion + metrics in one step, using the label set's buckets."""
    confusion, miss = compute_confusion(pred, gt, len(labels), labels.ignore_id)
    bucket_of = None
    if labels.buckets:
        bucket_of = {i: labels.buckets[name] for i, name in enumerate(labels.names) if name in labels.buckets}
    return compute_metrics(confusion, miss, bucket_of)
