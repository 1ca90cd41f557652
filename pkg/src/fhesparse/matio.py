"""Matrix file interchange.

Binary format: 8-byte header (rows and cols as little-endian uint32)
followed by row-major little-endian float64 values. Files ending in .csv
use plain comma-separated rows instead. Both parse trivially from any
language.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import CorruptionError


def save_matrix(M: np.ndarray, path: str | Path) -> Path:
    path = Path(path)
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise CorruptionError(f"expected 2-D matrix, got shape {M.shape}")
    if path.suffix == ".csv":
        np.savetxt(path, M, delimiter=",")
        return path
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", M.shape[0], M.shape[1]))
        fh.write(M.astype("<f8").tobytes(order="C"))
    return path


def load_matrix(path: str | Path) -> np.ndarray:
    path = Path(path)
    if path.suffix == ".csv":
        M = np.loadtxt(path, delimiter=",", ndmin=2)
        return M.astype(np.float64)
    raw = path.read_bytes()
    if len(raw) < 8:
        raise CorruptionError(f"{path}: truncated header")
    rows, cols = struct.unpack("<II", raw[:8])
    expected = 8 + rows * cols * 8
    if len(raw) != expected:
        raise CorruptionError(f"{path}: expected {expected} bytes, found {len(raw)}")
    values = np.frombuffer(raw[8:], dtype="<f8")
    return values.reshape(rows, cols).astype(np.float64)
