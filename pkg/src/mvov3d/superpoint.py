"""Geometric superpoints: normal estimation, k-NN graph, greedy graph merging,
and within-segment feature pooling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigurationError
from .fusion import PointFeatureField
from .scene import ScenePointCloud

DEFAULT_KNN = 16
DEFAULT_K_PARAM = 0.1
DEFAULT_MIN_SIZE = 20

# Sign disambiguation: orient each normal toward the first reference direction
# it is not perpendicular to.
_REFERENCE_DIRECTIONS = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])


@dataclass
class PointAdjacencyGraph:
    """Undirected k-NN graph with normal-dissimilarity edge weights in [0, 2]."""

    num_nodes: int
    edges: np.ndarray  # (E, 2) int, i < j
    weights: np.ndarray  # (E,)


@dataclass
class SuperpointPartition:
    """Per-point segment labels, contiguous from 0."""

    labels: np.ndarray  # (M,) int in [0, Q)
    sizes: np.ndarray  # (Q,)

    @property
    def num_segments(self) -> int:
        return len(self.sizes)

    @staticmethod
    def from_labels(raw: np.ndarray) -> "SuperpointPartition":
        _, labels = np.unique(raw, return_inverse=True)
        sizes = np.bincount(labels)
        return SuperpointPartition(labels.astype(np.int64), sizes)

    @staticmethod
    def singletons(num_points: int) -> "SuperpointPartition":
        return SuperpointPartition(
            np.arange(num_points, dtype=np.int64), np.ones(num_points, dtype=np.int64)
        )


def estimate_normals(positions: np.ndarray, k: int = DEFAULT_KNN):
    """PCA normals from k nearest neighbors, unit length, sign-disambiguated.

    Returns (normals, degenerate) where degenerate flags neighborhoods of
    rank < 2 that fell back to the global up-vector.
    """
    positions = np.asarray(positions, dtype=np.float64)
    m = len(positions)
    if k < 3 or m < k:
        raise ConfigurationError(f"need M >= k >= 3, got M={m}, k={k}")
    tree = cKDTree(positions)
    _, nbr = tree.query(positions, k=k)
    neigh = positions[nbr]  # (M, k, 3)
    centered = neigh - neigh.mean(axis=1, keepdims=True)
    cov = np.einsum("mki,mkj->mij", centered, centered) / (k - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    normals = eigvecs[:, :, 0]  # smallest-eigenvalue direction

    # rank < 2: the two largest eigenvalues are not both significant
    scale = np.maximum(eigvals[:, 2], 1e-300)
    degenerate = eigvals[:, 1] / scale < 1e-8
    normals[degenerate] = _REFERENCE_DIRECTIONS[0]

    return _orient_normals(normals), degenerate


def _orient_normals(normals: np.ndarray) -> np.ndarray:
    """Flip each normal toward +z, breaking perpendicular ties by +y then +x."""
    out = normals.copy()
    undecided = np.ones(len(out), dtype=bool)
    for ref in _REFERENCE_DIRECTIONS:
        dots = out @ ref
        flip = undecided & (dots < -1e-12)
        out[flip] *= -1
        undecided &= np.abs(dots) <= 1e-12
    return out


def build_adjacency_graph(cloud: ScenePointCloud, k: int = DEFAULT_KNN) -> PointAdjacencyGraph:
    """Symmetric-closure k-NN graph weighted by 1 - cos(normals)."""
    if cloud.normals is None:
        raise ConfigurationError("cloud has no normals; run estimate_normals first")
    m = len(cloud)
    if k >= m:
        raise ConfigurationError(f"k={k} must be smaller than point count {m}")
    tree = cKDTree(cloud.positions)
    _, nbr = tree.query(cloud.positions, k=k + 1)  # first neighbor is the point itself
    src = np.repeat(np.arange(m), k)
    dst = nbr[:, 1:].reshape(-1)
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    weights = 1.0 - np.einsum("ij,ij->i", cloud.normals[pairs[:, 0]], cloud.normals[pairs[:, 1]])
    return PointAdjacencyGraph(m, pairs, np.clip(weights, 0.0, 2.0))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = np.arange(n)
        self.size = np.ones(n, dtype=np.int64)
        self.internal = np.zeros(n)  # max internal edge weight per component

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int, weight: float) -> int:
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        self.internal[a] = max(self.internal[a], self.internal[b], weight)
        return a


def segment_graph(
    graph: PointAdjacencyGraph,
    k_param: float = DEFAULT_K_PARAM,
    min_size: int = DEFAULT_MIN_SIZE,
) -> SuperpointPartition:
    """Greedy graph segmentation with an adaptive internal-difference criterion.

    Edges are scanned in ascending (weight, i, j) order; components a and b
    merge when the edge weight is at most min(Int(a) + k/|a|, Int(b) + k/|b|).
    A post-pass merges every component smaller than min_size into the neighbor
    reached through its cheapest outgoing edge.
    """
    uf = _UnionFind(graph.num_nodes)
    if len(graph.edges):
        order = np.lexsort((graph.edges[:, 1], graph.edges[:, 0], graph.weights))
        edges = graph.edges[order]
        weights = graph.weights[order]
        for (i, j), w in zip(edges, weights):
            a, b = uf.find(i), uf.find(j)
            if a == b:
                continue
            thr_a = uf.internal[a] + k_param / uf.size[a]
            thr_b = uf.internal[b] + k_param / uf.size[b]
            if w <= min(thr_a, thr_b):
                uf.union(a, b, w)

        # min-size pass: repeatedly absorb small components via cheapest edges
        changed = True
        while changed:
            changed = False
            for (i, j), w in zip(edges, weights):
                a, b = uf.find(i), uf.find(j)
                if a == b:
                    continue
                if uf.size[a] < min_size or uf.size[b] < min_size:
                    uf.union(a, b, w)
                    changed = True

    roots = np.array([uf.find(i) for i in range(graph.num_nodes)])
    return SuperpointPartition.from_labels(roots)


def compute_superpoints(
    cloud: ScenePointCloud,
    k: int = DEFAULT_KNN,
    k_param: float = DEFAULT_K_PARAM,
    min_size: int = DEFAULT_MIN_SIZE,
) -> SuperpointPartition:
    """Normals (if absent) -> k-NN graph -> segmentation, in one call."""
    if cloud.normals is None:
        cloud.normals, _ = estimate_normals(cloud.positions, k=max(3, min(k, len(cloud))))
    graph = build_adjacency_graph(cloud, k=min(k, len(cloud) - 1))
    return segment_graph(graph, k_param=k_param, min_size=min_size)


def pool_superpoints(
    field: PointFeatureField, partition: SuperpointPartition
) -> PointFeatureField:
    """Replace each point's feature by the mean over its superpoint's valid members.

    Invalid points inside a superpoint inherit the segment mean; superpoints
    with no valid member stay invalid (count 0).
    """
    if len(field.count) != len(partition.labels):
        raise ConfigurationError(
            f"field has {len(field.count)} points, partition {len(partition.labels)}"
        )
    q = partition.num_segments
    c = field.features.shape[1]
    seg_sum = np.zeros((q, c), dtype=np.float64)
    seg_valid = np.zeros(q, dtype=np.int64)
    valid = field.valid
    np.add.at(seg_sum, partition.labels[valid], field.features[valid])
    np.add.at(seg_valid, partition.labels[valid], 1)

    out = PointFeatureField.empty(len(field.count), c)
    has_feature = seg_valid > 0
    seg_mean = np.zeros_like(seg_sum)
    seg_mean[has_feature] = seg_sum[has_feature] / seg_valid[has_feature, None]

    # constant segments keep their value bit-exactly, so pooling is idempotent
    first_valid = np.full(q, -1, dtype=np.int64)
    valid_idx = np.nonzero(valid)[0]
    for i in valid_idx[::-1]:
        first_valid[partition.labels[i]] = i
    rep = np.zeros_like(seg_sum)
    rep[first_valid >= 0] = field.features[first_valid[first_valid >= 0]]
    same = np.ones(q, dtype=bool)
    mismatch = np.any(field.features[valid_idx] != rep[partition.labels[valid_idx]], axis=1)
    np.logical_and.at(same, partition.labels[valid_idx], ~mismatch)
    constant = same & has_feature
    seg_mean[constant] = rep[constant]
    point_ok = has_feature[partition.labels]
    out.features[point_ok] = seg_mean[partition.labels[point_ok]]
    out.count[point_ok] = seg_valid[partition.labels[point_ok]]
    return out
