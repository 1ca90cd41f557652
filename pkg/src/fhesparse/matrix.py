"""Chunked encrypted matrices with plaintext sparsity metadata.

A matrix is encrypted row-major into ciphertext chunks of ``chunk_size``
elements each; what gets packed depends on the layout. Dense and
binary-mask layouts pack every element (zeros included); CSR packs only
nonzeros in scan order; ELLPACK packs each row's nonzeros left-justified
and zero-padded to the maximum row population. Sparsity structure stays in
plaintext metadata; the values remain encrypted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .engine import CiphertextHandle, HeEngine
from .errors import BoundsError, CapacityError, CorruptionError, DimensionError


class Layout(str, Enum):
    DENSE = "dense"
    BINARY_MASK = "binary_mask"
    CSR = "csr"
    ELLPACK = "ellpack"


@dataclass(frozen=True)
class MatrixDims:
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise DimensionError(f"matrix dims must be positive, got {self.rows}x{self.cols}")


@dataclass(frozen=True)
class ChunkLayout:
    chunk_size: int
    chunk_count: int


@dataclass(frozen=True)
class DenseMeta:
    kind = Layout.DENSE


@dataclass(frozen=True)
class BinaryMaskMeta:
    kind = Layout.BINARY_MASK
    zero_mask: np.ndarray  # bool (n, m); True where the element is zero


@dataclass(frozen=True)
class CsrMeta:
    kind = Layout.CSR
    row_ptr: np.ndarray  # int64 (n + 1)
    col_idx: np.ndarray  # int64 (nnz), strictly increasing within each row


@dataclass(frozen=True)
class EllpackMeta:
    kind = Layout.ELLPACK
    width: int  # max nonzeros over rows
    cols: np.ndarray  # int64 (n, width)
    valid: np.ndarray  # bool (n, width); False marks padding


SparsityMetadata = Union[DenseMeta, BinaryMaskMeta, CsrMeta, EllpackMeta]


@dataclass
class EncryptedMatrix:
    dims: MatrixDims
    layout: Layout
    chunk_layout: ChunkLayout
    chunks: list[Optional[CiphertextHandle]]  # None == transparent zero chunk
    metadata: SparsityMetadata
    engine_id: int

    @property
    def chunk_size(self) -> int:
        return self.chunk_layout.chunk_size


def _packed_values(M: np.ndarray, layout: Layout):
    """Row-major value stream plus the metadata for the chosen layout."""
    n, m = M.shape
    if layout in (Layout.DENSE, Layout.BINARY_MASK):
        values = M.ravel()
        meta = DenseMeta() if layout is Layout.DENSE else BinaryMaskMeta(zero_mask=M == 0.0)
        return values, meta
    if layout is Layout.CSR:
        row_ptr = np.zeros(n + 1, dtype=np.int64)
        cols = []
        vals = []
        for i in range(n):
            nz = np.nonzero(M[i])[0]
            row_ptr[i + 1] = row_ptr[i] + len(nz)
            cols.append(nz)
            vals.append(M[i, nz])
        col_idx = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
        values = np.concatenate(vals) if vals else np.zeros(0)
        return values, CsrMeta(row_ptr=row_ptr, col_idx=col_idx.astype(np.int64))
    if layout is Layout.ELLPACK:
        counts = [int(np.count_nonzero(M[i])) for i in range(n)]
        width = max(counts) if counts else 0
        cols = np.zeros((n, width), dtype=np.int64)
        valid = np.zeros((n, width), dtype=bool)
        values = np.zeros(n * width)
        for i in range(n):
            nz = np.nonzero(M[i])[0]
            cols[i, : len(nz)] = nz
            valid[i, : len(nz)] = True
            values[i * width : i * width + len(nz)] = M[i, nz]
        return values, EllpackMeta(width=width, cols=cols, valid=valid)
    raise CorruptionError(f"unknown layout {layout}")


def encrypt_matrix(
    M: np.ndarray, chunk_size: int, layout: Layout, engine: HeEngine
) -> EncryptedMatrix:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.size == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {M.shape}")
    if chunk_size < 1:
        raise CapacityError("chunk size must be >= 1")
    if chunk_size > engine.slot_count:
        raise CapacityError(f"chunk size {chunk_size} exceeds {engine.slot_count} slots")
    dims = MatrixDims(*M.shape)
    values, meta = _packed_values(M, layout)
    chunk_count = math.ceil(len(values) / chunk_size) if len(values) else 0
    chunks: list[Optional[CiphertextHandle]] = []
    for c in range(chunk_count):
        chunks.append(engine.encrypt(values[c * chunk_size : (c + 1) * chunk_size]))
    return EncryptedMatrix(
        dims=dims,
        layout=layout,
        chunk_layout=ChunkLayout(chunk_size=chunk_size, chunk_count=chunk_count),
        chunks=chunks,
        metadata=meta,
        engine_id=engine.engine_id,
    )


def _gather_values(E: EncryptedMatrix, engine: HeEngine, count: int) -> np.ndarray:
    """Decrypt all chunks and concatenate the first chunk_size slots of each."""
    if len(E.chunks) != E.chunk_layout.chunk_count:
        raise CorruptionError("chunk list length disagrees with layout")
    c = E.chunk_size
    out = np.zeros(count)
    for idx, chunk in enumerate(E.chunks):
        lo = idx * c
        width = min(c, count - lo)
        if width <= 0:
            raise CorruptionError("more chunks than packed values")
        if chunk is not None:
            out[lo : lo + width] = engine.decrypt(chunk)[:width]
    return out


def decrypt_matrix(E: EncryptedMatrix, engine: HeEngine) -> np.ndarray:
    n, m = E.dims.rows, E.dims.cols
    meta = E.metadata
    if E.layout in (Layout.DENSE, Layout.BINARY_MASK):
        return _gather_values(E, engine, n * m).reshape(n, m)
    if E.layout is Layout.CSR:
        if not isinstance(meta, CsrMeta):
            raise CorruptionError("CSR layout without CSR metadata")
        row_ptr, col_idx = meta.row_ptr, meta.col_idx
        nnz = int(row_ptr[-1])
        if row_ptr[0] != 0 or len(col_idx) != nnz or np.any(np.diff(row_ptr) < 0):
            raise CorruptionError("invalid CSR metadata")
        values = _gather_values(E, engine, nnz)
        M = np.zeros((n, m))
        for i in range(n):
            for p in range(int(row_ptr[i]), int(row_ptr[i + 1])):
                M[i, col_idx[p]] = values[p]
        return M
    if E.layout is Layout.ELLPACK:
        if not isinstance(meta, EllpackMeta):
            raise CorruptionError("ELLPACK layout without ELLPACK metadata")
        j = meta.width
        values = _gather_values(E, engine, n * j)
        M = np.zeros((n, m))
        for i in range(n):
            for t in range(j):
                if meta.valid[i, t]:
                    M[i, meta.cols[i, t]] = values[i * j + t]
        return M
    raise CorruptionError(f"unknown layout {E.layout}")


def element_locator(E: EncryptedMatrix, i: int, j: int) -> Optional[tuple[int, int]]:
    """Chunk index and slot offset of element (i, j), or None if not stored."""
    n, m = E.dims.rows, E.dims.cols
    if not (0 <= i < n and 0 <= j < m):
        raise BoundsError(f"({i}, {j}) outside {n}x{m}")
    c = E.chunk_size
    if E.layout in (Layout.DENSE, Layout.BINARY_MASK):
        flat = i * m + j
        return flat // c, flat % c
    if E.layout is Layout.CSR:
        meta = E.metadata
        lo, hi = int(meta.row_ptr[i]), int(meta.row_ptr[i + 1])
        pos = lo + int(np.searchsorted(meta.col_idx[lo:hi], j))
        if pos < hi and meta.col_idx[pos] == j:
            return pos // c, pos % c
        return None
    if E.layout is Layout.ELLPACK:
        meta = E.metadata
        for t in range(meta.width):
            if meta.valid[i, t] and meta.cols[i, t] == j:
                flat = i * meta.width + t
                return flat // c, flat % c
        return None
    raise CorruptionError(f"unknown layout {E.layout}")


def matrix_bytes(E: EncryptedMatrix) -> int:
    """Total ciphertext footprint; transparent zero chunks cost nothing."""
    return sum(ch.byte_size for ch in E.chunks if ch is not None)


def metadata_bytes(E: EncryptedMatrix) -> int:
    """Plaintext metadata footprint: 1 byte per boolean, 8 per index."""
    meta = E.metadata
    if isinstance(meta, DenseMeta):
        return 0
    if isinstance(meta, BinaryMaskMeta):
        return int(meta.zero_mask.size)
    if isinstance(meta, CsrMeta):
        return 8 * (len(meta.row_ptr) + len(meta.col_idx))
    if isinstance(meta, EllpackMeta):
        return 8 * int(meta.cols.size) + int(meta.valid.size)
    raise CorruptionError(f"unknown metadata {type(meta)}")
