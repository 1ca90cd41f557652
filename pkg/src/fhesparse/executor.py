"""Result-element work distribution across a fixed thread pool.

One logical work item per result value, statically assigned by flat result
index modulo thread count. Writes into shared result chunks serialize on a
per-chunk lock when chunks hold more than one element; single-element
chunks are written without any coordination.
"""

from __future__ import annotations

import sys
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .engine import CiphertextHandle, HeEngine


@dataclass(frozen=True)
class ExecPlan:
    thread_count: int
    result_rows: int
    result_cols: int

    def __post_init__(self):
        if self.thread_count < 1:
            raise ValueError("thread_count must be >= 1")

    @property
    def items(self) -> list[tuple[int, int]]:
        return [
            (r, c) for r in range(self.result_rows) for c in range(self.result_cols)
        ]

    def thread_of(self, row: int, col: int) -> int:
        return (row * self.result_cols + col) % self.thread_count


class ChunkAccumulator:
    """Chunked result store with per-chunk mutual exclusion when needed."""

    def __init__(self, engine: HeEngine, chunk_count: int, chunk_size: int):
        self.engine = engine
        self.chunks: list[Optional[CiphertextHandle]] = [None] * chunk_count
        self._locks: Optional[list[threading.Lock]] = None
        if chunk_size > 1:
            self._locks = [threading.Lock() for _ in range(chunk_count)]

    def merge(self, chunk_index: int, handle: Optional[CiphertextHandle]) -> None:
        if handle is None:
            return
        if self._locks is None:
            current = self.chunks[chunk_index]
            self.chunks[chunk_index] = (
                handle if current is None else self.engine.add(current, handle)
            )
            return
        with self._locks[chunk_index]:
            current = self.chunks[chunk_index]
            self.chunks[chunk_index] = (
                handle if current is None else self.engine.add(current, handle)
            )

    def coordination_bytes(self) -> int:
        """Memory spent on cross-thread exclusion state."""
        if self._locks is None:
            return 0
        per_lock = sys.getsizeof(self._locks[0]) + 8  # lock object + list slot
        return len(self._locks) * per_lock


def execute(
    plan: ExecPlan,
    kernel: Callable[[int, int], tuple[int, Optional[CiphertextHandle]]],
    accumulator: ChunkAccumulator,
) -> ChunkAccumulator:
    """Run every item exactly once; propagate the first kernel error after drain."""
    items = plan.items
    if plan.thread_count == 1:
        for row, col in items:
            chunk_index, handle = kernel(row, col)
            accumulator.merge(chunk_index, handle)
        return accumulator

    errors: list[Optional[BaseException]] = [None] * plan.thread_count

    def worker(tid: int) -> None:
        try:
            for row, col in items:
                if plan.thread_of(row, col) != tid:
                    continue
                chunk_index, handle = kernel(row, col)
                accumulator.merge(chunk_index, handle)
        except BaseException as exc:  # propagated after pool drain
            errors[tid] = exc

    pool = [threading.Thread(target=worker, args=(t,)) for t in range(plan.thread_count)]
    for th in pool:
        th.start()
    for th in pool:
        th.join()
    for exc in errors:
        if exc is not None:
            raise exc
    return accumulator


@dataclass
class ScalingCell:
    size: int
    sparsity: float
    threads: int
    runtime_s: float
    speedup: float = field(default=0.0)


def scaling_report(
    engine: HeEngine,
    scheme,
    sizes: list[int],
    sparsities: list[float],
    thread_counts: list[int],
    chunk_size: int = 1,
    seed: int = 0,
) -> list[ScalingCell]:
    """Wall-clock per configuration with speedups normalized to one thread."""
    from .bench import generate_operands
    from .matrix import encrypt_matrix
    from .schemes import SCHEME_LAYOUT, matmul

    cells: list[ScalingCell] = []
    for size in sizes:
        for sp in sparsities:
            A, B = generate_operands(size, sp, seed)
            layout = SCHEME_LAYOUT[scheme]
            lhs = encrypt_matrix(A, chunk_size, layout, engine)
            rhs = encrypt_matrix(B, chunk_size, layout, engine)
            base = 0.0
            for t in sorted(set(thread_counts) | {1}):
                start = time.perf_counter()
                matmul(lhs, rhs, scheme, engine, threads=t)
                elapsed = time.perf_counter() - start
                if t == 1:
                    base = elapsed
                cells.append(
                    ScalingCell(
                        size=size,
                        sparsity=sp,
                        threads=t,
                        runtime_s=elapsed,
                        speedup=base / elapsed if elapsed > 0 else 0.0,
                    )
                )
    return cells
