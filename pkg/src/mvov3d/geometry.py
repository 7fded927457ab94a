"""Pinhole projection, depth-tested visibility, and point-pixel correspondences."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

DEFAULT_DEPTH_TOLERANCE = 0.05  # meters


@dataclass(frozen=True)
class CameraModel:
    """Pinhole camera: 3x3 intrinsics and a 4x4 world-to-camera transform."""

    intrinsics: np.ndarray
    extrinsics: np.ndarray
    width: int
    height: int

    def __post_init__(self):
        K = np.asarray(self.intrinsics, dtype=np.float64)
        E = np.asarray(self.extrinsics, dtype=np.float64)
        if K.shape != (3, 3) or E.shape != (4, 4):
            raise ConfigurationError("intrinsics must be 3x3 and extrinsics 4x4")
        fx, fy = K[0, 0], K[1, 1]
        cx, cy = K[0, 2], K[1, 2]
        if fx <= 0 or fy <= 0:
            raise ConfigurationError(f"focal lengths must be positive, got fx={fx}, fy={fy}")
        if not (0 < cx < self.width and 0 < cy < self.height):
            raise ConfigurationError("principal point must lie inside the image")
        R = E[:3, :3]
        if not np.allclose(R @ R.T, np.eye(3), atol=1e-5):
            raise ConfigurationError("extrinsics rotation block is not orthonormal")
        object.__setattr__(self, "intrinsics", K)
        object.__setattr__(self, "extrinsics", E)


@dataclass(frozen=True)
class DepthMap:
    """Per-pixel depth in meters; 0.0 marks invalid pixels."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ConfigurationError("depth map must be 2D")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ConfigurationError("depth values must be finite and non-negative")
        object.__setattr__(self, "values", v)


@dataclass
class PointPixelMap:
    """Visible-point correspondences for one view (parallel arrays)."""

    point_indices: np.ndarray  # (V,) int
    rows: np.ndarray  # (V,) int
    cols: np.ndarray  # (V,) int
    depths: np.ndarray  # (V,) float, camera-space

    def __len__(self) -> int:
        return len(self.point_indices)

    @staticmethod
    def empty() -> "PointPixelMap":
        return PointPixelMap(
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.float64),
        )


def project_points(points: np.ndarray, camera: CameraModel):
    """Project Nx3 world points; returns (rows, cols, depths, in_front_and_in_bounds).

    Pixels are quantized by nearest-integer rounding. Points with camera-space
    depth <= 0 or landing outside the image are masked out.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    E = camera.extrinsics
    cam = points @ E[:3, :3].T + E[:3, 3]
    z = cam[:, 2]
    safe_z = np.where(z > 0, z, 1.0)
    u = camera.intrinsics[0, 0] * cam[:, 0] / safe_z + camera.intrinsics[0, 2]
    v = camera.intrinsics[1, 1] * cam[:, 1] / safe_z + camera.intrinsics[1, 2]
    cols = np.rint(np.clip(u, -1, camera.width)).astype(np.int64)
    rows = np.rint(np.clip(v, -1, camera.height)).astype(np.int64)
    ok = (
        (z > 0)
        & (rows >= 0)
        & (rows < camera.height)
        & (cols >= 0)
        & (cols < camera.width)
    )
    return rows, cols, z, ok


def project_point(point, camera: CameraModel):
    """Project one world point; None when behind the camera or out of bounds."""
    rows, cols, z, ok = project_points(np.asarray(point, dtype=np.float64)[None, :], camera)
    if not ok[0]:
        return None
    return int(rows[0]), int(cols[0]), float(z[0])


def visibility_test(
    point,
    camera: CameraModel,
    depth_map: DepthMap,
    depth_tolerance: float = DEFAULT_DEPTH_TOLERANCE,
) -> bool:
    """True iff the point projects into the image and agrees with the stored depth."""
    _check_depth_dims(camera, depth_map)
    hit = project_point(point, camera)
    if hit is None:
        return False
    r, c, z = hit
    stored = depth_map.values[r, c]
    return stored > 0 and abs(z - stored) <= depth_tolerance


def build_point_pixel_map(
    positions: np.ndarray,
    camera: CameraModel,
    depth_map: DepthMap,
    depth_tolerance: float = DEFAULT_DEPTH_TOLERANCE,
) -> PointPixelMap:
    """Correspondences for all points of a cloud passing the visibility test."""
    _check_depth_dims(camera, depth_map)
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    if len(positions) == 0:
        return PointPixelMap.empty()
    rows, cols, z, ok = project_points(positions, camera)
    idx = np.nonzero(ok)[0]
    if len(idx) == 0:
        return PointPixelMap.empty()
    r, c, d = rows[idx], cols[idx], z[idx]
    stored = depth_map.values[r, c]
    keep = (stored > 0) & (np.abs(d - stored) <= depth_tolerance)
    idx = idx[keep]
    return PointPixelMap(idx, r[keep], c[keep], d[keep])


def _check_depth_dims(camera: CameraModel, depth_map: DepthMap) -> None:
    if depth_map.values.shape != (camera.height, camera.width):
        raise ConfigurationError(
            f"depth map shape {depth_map.values.shape} does not match camera "
            f"({camera.height}, {camera.width})"
        )


def backproject_pixel(row: int, col: int, depth: float, camera: CameraModel) -> np.ndarray:
    """Invert the pinhole model: pixel center + depth to a world point."""
    K, E = camera.intrinsics, camera.extrinsics
    x = (col - K[0, 2]) * depth / K[0, 0]
    y = (row - K[1, 2]) * depth / K[1, 1]
    cam = np.array([x, y, depth])
    R, t = E[:3, :3], E[:3, 3]
    return R.T @ (cam - t)
