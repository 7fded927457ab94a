"""Binary tensor interchange format.

Layout (all multi-byte fields little-endian):

    bytes 0..3   magic b"MVOV"
    bytes 4..7   format version, uint32
    bytes 8..11  dtype code, uint32 (1 = float32, 2 = uint8, 3 = int32)
    bytes 12..15 ndim, uint32
    then         ndim dims, uint64 each
    then         payload, row-major, dtype-sized elements
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import LoadError

MAGIC = b"MVOV"
FORMAT_VERSION = 1

_DTYPE_CODES = {
    1: np.dtype("<f4"),
    2: np.dtype("u1"),
    3: np.dtype("<i4"),
}
_CODE_FOR_KIND = {
    ("f", 4): 1,
    ("u", 1): 2,
    ("i", 4): 3,
}


def _dtype_code(dtype: np.dtype) -> int:
    key = (dtype.kind, dtype.itemsize)
    if key not in _CODE_FOR_KIND:
        raise ValueError(f"unsupported dtype {dtype}; use float32, uint8, or int32")
    return _CODE_FOR_KIND[key]


def save_tensor(path: str | Path, array: np.ndarray) -> None:
    """Write ``array`` to ``path`` in the interchange format."""
    array = np.ascontiguousarray(array)
    code = _dtype_code(array.dtype)
    header = MAGIC + struct.pack("<III", FORMAT_VERSION, code, array.ndim)
    header += struct.pack(f"<{array.ndim}Q", *array.shape)
    payload = array.astype(array.dtype.newbyteorder("<"), copy=False).tobytes()
    Path(path).write_bytes(header + payload)


def load_tensor(path: str | Path) -> np.ndarray:
    """Read a tensor, validating magic, version, dtype, and payload size."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise LoadError(f"{path}: cannot read tensor file ({exc})") from exc

    if len(raw) < 16:
        raise LoadError(f"{path}: file too short for a tensor header ({len(raw)} bytes)")
    if raw[:4] != MAGIC:
        raise LoadError(f"{path}: bad magic {raw[:4]!r}, expected {MAGIC!r}")
    version, code, ndim = struct.unpack("<III", raw[4:16])
    if version != FORMAT_VERSION:
        raise LoadError(f"{path}: unsupported format version {version}")
    if code not in _DTYPE_CODES:
        raise LoadError(f"{path}: unknown dtype code {code}")
    if len(raw) < 16 + 8 * ndim:
        raise LoadError(f"{path}: truncated dimension list (ndim={ndim})")
    dims = struct.unpack(f"<{ndim}Q", raw[16 : 16 + 8 * ndim])

    dtype = _DTYPE_CODES[code]
    expected = int(np.prod(dims, dtype=np.int64)) * dtype.itemsize if ndim else dtype.itemsize
    if ndim == 0:
        expected = dtype.itemsize
    payload = raw[16 + 8 * ndim :]
    if len(payload) != expected:
        raise LoadError(
            f"{path}: payload is {len(payload)} bytes, expected {expected} "
            f"for dims {dims} dtype {dtype.name}"
        )
    return np.frombuffer(payload, dtype=dtype).reshape(dims).copy()
