"""Segment a point cloud into geometric superpoints and pool features in them.

Two orthogonal planes produce two superpoints; pooling then replaces each
point's noisy fused feature with its superpoint mean, which also fills in
points no camera ever saw.
"""

import numpy as np

from mvov3d import (
    PointFeatureField,
    ScenePointCloud,
    build_adjacency_graph,
    estimate_normals,
    pool_superpoints,
    segment_graph,
)

g = np.linspace(0.0, 1.0, 15)
uu, vv = np.meshgrid(g, g)
floor = np.stack([uu.ravel(), vv.ravel(), np.zeros(uu.size)], axis=1)
wall = np.stack([np.full(uu.size, -0.5), uu.ravel(), 0.02 + vv.ravel()], axis=1)
points = np.concatenate([floor, wall])

normals, degenerate = estimate_normals(points, k=8)
print(f"estimated normals for {len(points)} points ({int(degenerate.sum())} degenerate)")

cloud = ScenePointCloud(points, normals=normals)
graph = build_adjacency_graph(cloud, k=8)
partition = segment_graph(graph, k_param=0.1, min_size=10)
print(f"{partition.num_segments} superpoints, sizes {partition.sizes.tolist()}")

# Noisy per-point features; a tenth of the points were never observed.
rng = np.random.default_rng(2)
clean = np.where(points[:, 2:3] > 0.01, [1.0, 0.0], [0.0, 1.0])
counts = (rng.random(len(points)) > 0.1).astype(np.int64)
field = PointFeatureField((clean + 0.4 * rng.standard_normal(clean.shape)) * counts[:, None], counts)

pooled = pool_superpoints(field, partition)
err_before = np.linalg.norm(field.features[counts > 0] - clean[counts > 0], axis=1).mean()
err_after = np.linalg.norm(pooled.features - clean, axis=1).mean()
print(f"mean feature error: {err_before:.3f} unpooled, {err_after:.3f} pooled")
print(f"unseen points now carrying features: {int((pooled.count > 0).sum() - (counts > 0).sum())}")
