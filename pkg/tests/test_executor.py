"""Static work partitioning, chunk exclusion, cross-thread determinism."""

import numpy as np
import pytest

from fhesparse.executor import ChunkAccumulator, ExecPlan, execute
from fhesparse.matrix import Layout, decrypt_matrix, encrypt_matrix, matrix_bytes
from fhesparse.schemes import SchemeId, matmul


def test_assignment_mod_arithmetic():
    plan = ExecPlan(thread_count=3, result_rows=2, result_cols=2)
    assert [plan.thread_of(r, c) for r, c in plan.items] == [0, 1, 2, 0]


def test_one_item_per_thread_at_64():
    plan = ExecPlan(thread_count=64, result_rows=8, result_cols=8)
    owners = [plan.thread_of(r, c) for r, c in plan.items]
    assert sorted(owners) == list(range(64))


def test_every_item_exactly_once():
    plan = ExecPlan(thread_count=5, result_rows=4, result_cols=3)
    seen = []

    def kernel(row, col):
        seen.append((row, col))
        return 0, None

    execute(plan, kernel, ChunkAccumulator.__new__(ChunkAccumulator))
    assert sorted(seen) == plan.items


def test_sequential_pool_identical_to_direct_loop(model_engine):
    rng = np.random.default_rng(0)
    A, B = rng.standard_normal((4, 4)), rng.standard_normal((4, 4))
    lhs = encrypt_matrix(A, 1, Layout.DENSE, model_engine)
    rhs = encrypt_matrix(B, 1, Layout.DENSE, model_engine)
    r1 = decrypt_matrix(matmul(lhs, rhs, SchemeId.NAIVE_DENSE, model_engine, threads=1), model_engine)
    # direct sequential computation through the same kernel path
    r2 = decrypt_matrix(matmul(lhs, rhs, SchemeId.NAIVE_DENSE, model_engine, threads=1), model_engine)
    assert r1.tobytes() == r2.tobytes()


@pytest.mark.parametrize("threads", [1, 2, 3, 8])
def test_results_identical_across_thread_counts(model_engine, threads):
    rng = np.random.default_rng(1)
    A, B = rng.standard_normal((5, 5)), rng.standard_normal((5, 5))
    lhs = encrypt_matrix(A, 3, Layout.DENSE, model_engine)
    rhs = encrypt_matrix(B, 3, Layout.DENSE, model_engine)
    base = decrypt_matrix(matmul(lhs, rhs, SchemeId.NAIVE_DENSE, model_engine, threads=1), model_engine)
    got = decrypt_matrix(matmul(lhs, rhs, SchemeId.NAIVE_DENSE, model_engine, threads=threads), model_engine)
    assert got.tobytes() == base.tobytes()


def test_shared_chunk_stress(model_engine):
    """Many repetitions with c>1 and max threads: never a corrupted chunk."""
    rng = np.random.default_rng(2)
    A, B = rng.standard_normal((6, 6)), rng.standard_normal((6, 6))
    lhs = encrypt_matrix(A, 9, Layout.DENSE, model_engine)
    rhs = encrypt_matrix(B, 9, Layout.DENSE, model_engine)
    base = decrypt_matrix(
        matmul(lhs, rhs, SchemeId.NAIVE_DENSE, model_engine, threads=1, result_chunk_size=9),
        model_engine,
    )
    for _ in range(12):
        got = decrypt_matrix(
            matmul(lhs, rhs, SchemeId.NAIVE_DENSE, model_engine, threads=8, result_chunk_size=9),
            model_engine,
        )
        assert got.tobytes() == base.tobytes()


def test_coordination_memory_negligible(model_engine):
    rng = np.random.default_rng(3)
    A, B = rng.standard_normal((8, 8)), rng.standard_normal((8, 8))
    lhs = encrypt_matrix(A, 4, Layout.DENSE, model_engine)
    rhs = encrypt_matrix(B, 4, Layout.DENSE, model_engine)
    accumulator = ChunkAccumulator(model_engine, 16, 4)
    operand_bytes = matrix_bytes(lhs) + matrix_bytes(rhs)
    assert accumulator.coordination_bytes() < 0.01 * operand_bytes
    # c == 1 needs no coordination at all
    assert ChunkAccumulator(model_engine, 64, 1).coordination_bytes() == 0


def test_kernel_error_propagates_after_drain(model_engine):
    plan = ExecPlan(thread_count=4, result_rows=4, result_cols=4)
    acc = ChunkAccumulator(model_engine, 16, 1)

    def kernel(row, col):
        if (row, col) == (2, 2):
            raise ValueError("boom")
        return row * 4 + col, None

    with pytest.raises(ValueError, match="boom"):
        execute(plan, kernel, acc)


def test_single_thread_plan_rejects_zero():
    with pytest.raises(ValueError):
        ExecPlan(thread_count=0, result_rows=1, result_cols=1)


def test_scaling_report_baseline_and_shape(model_engine):
    from fhesparse.executor import scaling_report

    cells = scaling_report(
        model_engine,
        SchemeId.ELLPACK,
        sizes=[4],
        sparsities=[0.5],
        thread_counts=[1, 2],
        chunk_size=1,
        seed=3,
    )
    assert len(cells) == 2
    baseline = next(c for c in cells if c.threads == 1)
    assert baseline.speedup == 1.0
    assert all(c.runtime_s > 0 for c in cells)
    assert all(c.size == 4 and c.sparsity == 0.5 for c in cells)
