"""Encrypted matrix multiplication schemes.

All four schemes run the same per-contribution pipeline: rotate both
operand chunks so the wanted values sit in slot zero, multiply, relinearize,
rescale, mask down to slot zero, rescale again, rotate into the result slot
and accumulate. They differ only in which k-terms of each dot product are
computed; the sparse schemes skip any term with a zero operand, which the
plaintext metadata reveals without decrypting values.

Result elements whose term list is empty never touch the engine: their
chunk slot remains a plaintext zero, and chunks where every element is
skipped stay transparent (decrypt to exact zeros). In mixed chunks the
skipped slots are simply never accumulated into, so they decrypt to the
engine's noise floor rather than exact zero.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .engine import CiphertextHandle, HeEngine
from .errors import CorruptionError, LayoutMismatchError, ShapeError
from .executor import ChunkAccumulator, ExecPlan, execute
from .matrix import (
    ChunkLayout,
    DenseMeta,
    EncryptedMatrix,
    Layout,
    MatrixDims,
    SparsityMetadata,
    element_locator,
)


class SchemeId(str, Enum):
    NAIVE_DENSE = "dense"
    NAIVE_SPARSE = "naive"
    CSR = "csr"
    ELLPACK = "ellpack"


SCHEME_LAYOUT = {
    SchemeId.NAIVE_DENSE: Layout.DENSE,
    SchemeId.NAIVE_SPARSE: Layout.BINARY_MASK,
    SchemeId.CSR: Layout.CSR,
    SchemeId.ELLPACK: Layout.ELLPACK,
}


@dataclass(frozen=True)
class WorkItem:
    row: int
    col: int
    contributions: tuple[int, ...]


@dataclass(frozen=True)
class OpCounts:
    rotations: int = 0
    ct_multiplies: int = 0
    plain_multiplies: int = 0
    relinearizations: int = 0
    rescales: int = 0
    additions: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "rotations": self.rotations,
            "ct_multiplies": self.ct_multiplies,
            "plain_multiplies": self.plain_multiplies,
            "relinearizations": self.relinearizations,
            "rescales": self.rescales,
            "additions": self.additions,
        }


def contributions_for(
    scheme: SchemeId,
    lhs_meta: SparsityMetadata,
    rhs_meta: SparsityMetadata,
    row: int,
    col: int,
    shared_dim: int,
) -> tuple[int, ...]:
    """Ascending k-indices that actually contribute to result (row, col)."""
    if scheme is SchemeId.NAIVE_DENSE:
        return tuple(range(shared_dim))
    if scheme is SchemeId.NAIVE_SPARSE:
        zl: np.ndarray = lhs_meta.zero_mask
        zr: np.ndarray = rhs_meta.zero_mask
        keep = ~(zl[row, :] | zr[:, col])
        return tuple(int(k) for k in np.nonzero(keep)[0])
    if scheme is SchemeId.CSR:
        out = []
        lo, hi = int(lhs_meta.row_ptr[row]), int(lhs_meta.row_ptr[row + 1])
        for p in range(lo, hi):
            k = int(lhs_meta.col_idx[p])
            rlo, rhi = int(rhs_meta.row_ptr[k]), int(rhs_meta.row_ptr[k + 1])
            pos = rlo + int(np.searchsorted(rhs_meta.col_idx[rlo:rhi], col))
            if pos < rhi and rhs_meta.col_idx[pos] == col:
                out.append(k)
        return tuple(out)
    if scheme is SchemeId.ELLPACK:
        out = []
        for t in range(lhs_meta.width):
            if not lhs_meta.valid[row, t]:
                continue
            k = int(lhs_meta.cols[row, t])
            for u in range(rhs_meta.width):
                if rhs_meta.valid[k, u] and rhs_meta.cols[k, u] == col:
                    out.append(k)
                    break
        return tuple(sorted(out))
    raise LayoutMismatchError(f"unknown scheme {scheme}")


def _check_operands(lhs: EncryptedMatrix, rhs: EncryptedMatrix, scheme: SchemeId) -> None:
    if lhs.dims.cols != rhs.dims.rows:
        raise ShapeError(
            f"cannot multiply {lhs.dims.rows}x{lhs.dims.cols} by {rhs.dims.rows}x{rhs.dims.cols}"
        )
    want = SCHEME_LAYOUT[scheme]
    for side, E in (("lhs", lhs), ("rhs", rhs)):
        if E.layout is not want:
            raise LayoutMismatchError(
                f"{scheme.value} scheme requires {want.value} layout, {side} is {E.layout.value}"
            )


def compute_element(
    lhs: EncryptedMatrix,
    rhs: EncryptedMatrix,
    item: WorkItem,
    engine: HeEngine,
    result_offset: int = 0,
) -> Optional[CiphertextHandle]:
    """One result element per Algorithm-style pipeline, or None when exact zero."""
    if not item.contributions:
        return None
    mask = np.array([1.0])
    acc: Optional[CiphertextHandle] = None
    for k in item.contributions:
        loc_a = element_locator(lhs, item.row, k)
        loc_b = element_locator(rhs, k, item.col)
        if loc_a is None or loc_b is None:
            raise CorruptionError("contribution points at an unstored element")
        chunk_a, off_a = loc_a
        chunk_b, off_b = loc_b
        a = engine.rotate(lhs.chunks[chunk_a], off_a)
        b = engine.rotate(rhs.chunks[chunk_b], off_b)
        prod = engine.multiply(a, b)
        prod = engine.relinearize(prod)
        prod = engine.rescale(prod)
        prod = engine.multiply_plain(prod, mask)
        prod = engine.relinearize(prod)  # no-op by design; kept for call parity
        prod = engine.rescale(prod)
        prod = engine.rotate(prod, -result_offset)
        acc = prod if acc is None else engine.add(acc, prod)
    return acc


def build_work_items(
    lhs: EncryptedMatrix, rhs: EncryptedMatrix, scheme: SchemeId
) -> list[WorkItem]:
    shared = lhs.dims.cols
    return [
        WorkItem(r, c, contributions_for(scheme, lhs.metadata, rhs.metadata, r, c, shared))
        for r in range(lhs.dims.rows)
        for c in range(rhs.dims.cols)
    ]


def matmul(
    lhs: EncryptedMatrix,
    rhs: EncryptedMatrix,
    scheme: SchemeId,
    engine: HeEngine,
    threads: Optional[int] = None,
    result_chunk_size: Optional[int] = None,
) -> EncryptedMatrix:
    """Encrypted product as a dense-layout chunked matrix.

    A thread pool of ``threads`` workers (hardware concurrency when omitted)
    is created for this call; one work item per result element.
    """
    _check_operands(lhs, rhs, scheme)
    if threads is None:
        threads = os.cpu_count() or 1
    n, m = lhs.dims.rows, rhs.dims.cols
    c_res = result_chunk_size or lhs.chunk_size
    chunk_count = -(-(n * m) // c_res)
    items = {
        (it.row, it.col): it for it in build_work_items(lhs, rhs, scheme)
    }
    accumulator = ChunkAccumulator(engine, chunk_count, c_res)
    plan = ExecPlan(thread_count=threads, result_rows=n, result_cols=m)

    def kernel(row: int, col: int) -> tuple[int, Optional[CiphertextHandle]]:
        flat = row * m + col
        handle = compute_element(lhs, rhs, items[(row, col)], engine, flat % c_res)
        return flat // c_res, handle

    execute(plan, kernel, accumulator)
    return EncryptedMatrix(
        dims=MatrixDims(n, m),
        layout=Layout.DENSE,
        chunk_layout=ChunkLayout(chunk_size=c_res, chunk_count=chunk_count),
        chunks=accumulator.chunks,
        metadata=DenseMeta(),
        engine_id=engine.engine_id,
    )


def homomorphic_op_count(
    scheme: SchemeId,
    lhs: EncryptedMatrix,
    rhs: EncryptedMatrix,
) -> OpCounts:
    """Primitive operation counts matmul will issue (including no-op calls).

    Per contributing term: two operand rotations plus the result rotation,
    one ciphertext multiply, one plaintext multiply, two relinearize calls
    (the post-mask one is a no-op), two rescales, and one accumulation.
    """
    _check_operands(lhs, rhs, scheme)
    total = sum(len(it.contributions) for it in build_work_items(lhs, rhs, scheme))
    return OpCounts(
        rotations=3 * total,
        ct_multiplies=total,
        plain_multiplies=total,
        relinearizations=2 * total,
        rescales=2 * total,
        additions=total,
    )
