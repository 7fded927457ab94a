"""Project 3D points into a posed camera and test depth-gated visibility.

Every downstream stage rests on this correspondence machinery: a point
contributes a view's pixel feature only when it projects inside the image
and agrees with the rendered depth at that pixel.
"""

import numpy as np

from mvov3d import CameraModel, DepthMap, build_point_pixel_map, project_point, visibility_test

W, H = 64, 48
K = np.array([[50.0, 0, W / 2], [0, 50.0, H / 2], [0, 0, 1.0]])
camera = CameraModel(K, np.eye(4), W, H)

# A point straight ahead lands on the principal point.
print("principal axis:", project_point([0.0, 0.0, 2.0], camera))
# Points behind the camera never project.
print("behind camera: ", project_point([0.0, 0.0, -2.0], camera))

# Render a wall at z=3 over the right half of the image.
depth = np.zeros((H, W))
depth[:, W // 2 :] = 3.0
depth_map = DepthMap(depth)

on_wall = [0.5, 0.0, 3.0]
behind_wall = [0.5, 0.0, 4.0]
print("on the wall:   ", visibility_test(on_wall, camera, depth_map, 0.05))
print("behind the wall:", visibility_test(behind_wall, camera, depth_map, 0.05))

# Bulk correspondences for a random cloud.
rng = np.random.default_rng(0)
cloud = rng.uniform([-1, -1, 2.5], [1, 1, 3.5], size=(500, 3))
ppm = build_point_pixel_map(cloud, camera, depth_map, 0.05)
print(f"{len(ppm)} of {len(cloud)} random points are visible against the wall")
