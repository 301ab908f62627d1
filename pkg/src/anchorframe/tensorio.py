"""Flat-binary tensor files for the loss CLI.

Layout (little-endian): magic ``AFT1``, u32 rank, u32 per-dimension sizes,
then the float64 payload in C order. Trivial to emit from any language for
cross-implementation checks.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import TensorFormatError

MAGIC = b"AFT1"


def write_tensor(path: str | Path, array: np.ndarray) -> None:
    arr = np.ascontiguousarray(array, dtype=np.float64)
    header = MAGIC + struct.pack("<I", arr.ndim)
    header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    Path(path).write_bytes(header + arr.tobytes())


def read_tensor(path: str | Path) -> np.ndarray:
    try:
        data = Path(path).read_bytes()
    except FileNotFoundError:
        raise TensorFormatError(f"tensor file not found: {path}") from None
    if len(data) < 8 or data[:4] != MAGIC:
        raise TensorFormatError(f"{path}: missing AFT1 magic")
    (rank,) = struct.unpack_from("<I", data, 4)
    if rank < 1 or rank > 8:
        raise TensorFormatError(f"{path}: implausible rank {rank}")
    dims_end = 8 + 4 * rank
    if len(data) < dims_end:
        raise TensorFormatError(f"{path}: truncated dimension list")
    dims = struct.unpack_from(f"<{rank}I", data, 8)
    count = 1
    for d in dims:
        if d < 1:
            raise TensorFormatError(f"{path}: zero-sized dimension in {dims}")
        count *= d
    expected = dims_end + 8 * count
    if len(data) != expected:
        raise TensorFormatError(
            f"{path}: payload size mismatch (expected {expected} bytes, got {len(data)})"
        )
    return np.frombuffer(data[dims_end:], dtype="<f8").reshape(dims)
