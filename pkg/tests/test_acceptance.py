"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s``. The full grid is the
default and takes roughly an hour on two cores (the real-engine correctness
sweep dominates); set FHESPARSE_FAST=1 for an abbreviated development run.
"""

import os

import numpy as np
import pytest

from fhesparse import CkksEngine, ModelEngine
from fhesparse.bench import (
    BenchConfig,
    all_passed,
    generate_operands,
    operand_seed,
    records_csv,
    run_suite,
)
from fhesparse.executor import ChunkAccumulator
from fhesparse.matrix import Layout, decrypt_matrix, encrypt_matrix, matrix_bytes
from fhesparse.schemes import SCHEME_LAYOUT, SchemeId, matmul

ACCEPT_SEED = 0
EPSILON = 1e-3
FAST = os.environ.get("FHESPARSE_FAST") == "1"
SIZES = (2, 3) if FAST else (2, 3, 5, 8, 16)
SPARSITIES = (0.0, 0.5, 1.0) if FAST else tuple(round(0.1 * i, 1) for i in range(11))
WORK_THREADS = 2  # in-matmul parallelism for the heavy sweeps

SPARSE_SCHEMES = (SchemeId.NAIVE_SPARSE, SchemeId.CSR, SchemeId.ELLPACK)


def report(num: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"\nACCEPTANCE {num} {name}: {status}{suffix}")


@pytest.fixture(scope="module")
def accept_ckks():
    return CkksEngine(seed=ACCEPT_SEED)


@pytest.fixture(scope="module")
def accept_model():
    return ModelEngine()


@pytest.fixture(scope="module")
def ckks_8x8_records(accept_ckks):
    """Shared single-thread 8x8 run on the real engine for criteria 2-4."""
    cfg = BenchConfig(
        sizes=(8,),
        sparsities=SPARSITIES,
        schemes=tuple(SchemeId),
        thread_counts=(1,),
        chunk_size=1,
        engine="ckks",
        repeats=3,
        seed=ACCEPT_SEED,
        epsilon=EPSILON,
    )
    return run_suite(cfg, engine=accept_ckks)


def _median_runtime(records, scheme: SchemeId, sparsity: float) -> float:
    vals = sorted(
        r.runtime_s for r in records if r.scheme == scheme.value and r.sparsity == sparsity
    )
    return vals[len(vals) // 2]


def _nonsquare_operands(sparsity: float, seed: int):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((3, 5))
    B = rng.standard_normal((5, 2))
    for M in (A, B):
        zeros = int(sparsity * M.size)
        if zeros:
            idx = rng.choice(M.size, size=zeros, replace=False)
            M.ravel()[idx] = 0.0
    return A, B


def test_criterion_1_correctness_vs_oracle(accept_model, accept_ckks):
    """Every decrypted element within epsilon of the plaintext product."""
    worst = 0.0
    ok = True
    for engine_name, engine in (("model", accept_model), ("ckks", accept_ckks)):
        for chunk in (1, 4):
            cfg = BenchConfig(
                sizes=SIZES,
                sparsities=SPARSITIES,
                schemes=tuple(SchemeId),
                thread_counts=(WORK_THREADS,),
                chunk_size=chunk,
                engine=engine_name,
                repeats=1,
                seed=ACCEPT_SEED,
                epsilon=EPSILON,
            )
            records = run_suite(cfg, engine=engine)
            worst = max(worst, max(r.max_err for r in records))
            ok = ok and all_passed(records)
        # non-square: 3x5 by 5x2 across schemes, chunk sizes, sparsity levels
        for sparsity in (0.0, 0.4, 0.8):
            A, B = _nonsquare_operands(sparsity, ACCEPT_SEED + 17)
            truth = A @ B
            for scheme in SchemeId:
                layout = SCHEME_LAYOUT[scheme]
                for chunk in (1, 4):
                    lhs = encrypt_matrix(A, chunk, layout, engine)
                    rhs = encrypt_matrix(B, chunk, layout, engine)
                    out = decrypt_matrix(
                        matmul(lhs, rhs, scheme, engine, threads=WORK_THREADS), engine
                    )
                    err = float(np.max(np.abs(out - truth)))
                    worst = max(worst, err)
                    ok = ok and err < EPSILON
    report(1, "correctness-vs-oracle", ok, f"worst |err| {worst:.3e} < {EPSILON}")
    assert ok


def test_criterion_2_break_even_at_zero_sparsity(ckks_8x8_records):
    records = ckks_8x8_records
    ok = True
    details = []
    dense0 = _median_runtime(records, SchemeId.NAIVE_DENSE, 0.0)
    for scheme in SPARSE_SCHEMES:
        ratio0 = _median_runtime(records, scheme, 0.0) / dense0
        details.append(f"{scheme.value}@0.0 {ratio0:.3f}x")
        ok = ok and ratio0 <= 1.05
    for sparsity in [s for s in SPARSITIES if s >= 0.1]:
        dense = _median_runtime(records, SchemeId.NAIVE_DENSE, sparsity)
        for scheme in SPARSE_SCHEMES:
            ok = ok and _median_runtime(records, scheme, sparsity) < dense
    report(2, "break-even-at-0%", ok, "; ".join(details))
    assert ok


def test_criterion_3_speedup_at_half_sparsity(ckks_8x8_records):
    records = ckks_8x8_records
    dense = _median_runtime(records, SchemeId.NAIVE_DENSE, 0.5)
    speedups = [dense / _median_runtime(records, s, 0.5) for s in SPARSE_SCHEMES]
    mean_speedup = float(np.mean(speedups))
    ok = 1.5 <= mean_speedup <= 4.0
    report(3, "speedup-at-50%", ok, f"mean {mean_speedup:.2f}x (reference 2.5x, band [1.5, 4.0])")
    assert ok


def test_criterion_4_sparse_scheme_parity(ckks_8x8_records):
    """Pairwise sparse-scheme runtime ratios stay within [0.7, 1.4].

    Applied wherever the schemes perform homomorphic work; at full sparsity
    all three execute zero homomorphic operations (identical work by
    construction), so wall-clock ratios of bare dispatch overhead are not
    informative and op-count equality is asserted instead.
    """
    records = ckks_8x8_records
    ok = True
    worst = (1.0, None)
    for sparsity in SPARSITIES:
        meds = {s: _median_runtime(records, s, sparsity) for s in SPARSE_SCHEMES}
        if sparsity >= 1.0:
            counts = {
                s: sum(
                    sum(r.op_counts.values())
                    for r in records
                    if r.scheme == s.value and r.sparsity == sparsity
                )
                for s in SPARSE_SCHEMES
            }
            ok = ok and len(set(counts.values())) == 1 and list(counts.values())[0] == 0
            continue
        for a in SPARSE_SCHEMES:
            for b in SPARSE_SCHEMES:
                if a is b:
                    continue
                ratio = meds[a] / meds[b]
                if abs(np.log(ratio)) > abs(np.log(worst[0])):
                    worst = (ratio, (a.value, b.value, sparsity))
                ok = ok and 0.7 <= ratio <= 1.4
    report(4, "sparse-scheme-parity", ok, f"extreme ratio {worst[0]:.3f} at {worst[1]}")
    assert ok


def test_criterion_5_thread_scaling(accept_model, accept_ckks):
    """Identical results at every thread count; >=4x speedup needs >=8 cores."""
    A, B = generate_operands(8, 0.3, operand_seed(ACCEPT_SEED, 8, 0.3, 0))
    ok = True
    for engine, thread_counts in ((accept_model, (1, 2, 3, 8)), (accept_ckks, (1, 2))):
        lhs = encrypt_matrix(A, 1, Layout.DENSE, engine)
        rhs = encrypt_matrix(B, 1, Layout.DENSE, engine)
        base = decrypt_matrix(matmul(lhs, rhs, SchemeId.NAIVE_DENSE, engine, threads=1), engine)
        assert np.max(np.abs(base - A @ B)) < EPSILON
        for t in thread_counts[1:]:
            got = decrypt_matrix(matmul(lhs, rhs, SchemeId.NAIVE_DENSE, engine, threads=t), engine)
            ok = ok and got.tobytes() == base.tobytes()
    cores = os.cpu_count() or 1
    if cores >= 8:
        import time

        speedups = {}
        for scheme in (SchemeId.NAIVE_DENSE, SchemeId.ELLPACK):
            layout = SCHEME_LAYOUT[scheme]
            lhs = encrypt_matrix(A, 1, layout, accept_ckks)
            rhs = encrypt_matrix(B, 1, layout, accept_ckks)
            times = {}
            for t in (1, 8):
                start = time.perf_counter()
                matmul(lhs, rhs, scheme, accept_ckks, threads=t)
                times[t] = time.perf_counter() - start
            speedups[scheme.value] = times[1] / times[8]
            ok = ok and speedups[scheme.value] >= 4.0
        report(5, "thread-scaling", ok, f"T=8 speedups {speedups}, identity across T holds")
        assert ok
    else:
        report(
            5,
            "thread-scaling",
            ok,
            f"identity across T holds; speedup leg SKIPPED ({cores} cores < 8 required)",
        )
        assert ok
        pytest.skip(f"speedup leg needs >= 8 cores, found {cores}")


def test_criterion_6_memory_accounting(accept_model):
    rng = np.random.default_rng(ACCEPT_SEED)
    M = rng.standard_normal((8, 8))
    order = rng.permutation(64)
    prev = {Layout.CSR: None, Layout.ELLPACK: None, Layout.BINARY_MASK: None}
    ok = True
    for step in range(0, 65, 8):
        W = M.copy()
        W.ravel()[order[:step]] = 0.0
        for layout in prev:
            b = matrix_bytes(encrypt_matrix(W, 2, layout, accept_model))
            if prev[layout] is not None:
                if layout is Layout.BINARY_MASK:
                    ok = ok and b == prev[layout]
                else:
                    ok = ok and b <= prev[layout]
            prev[layout] = b
    ok = ok and prev[Layout.CSR] == 0 and prev[Layout.ELLPACK] == 0
    # threading overhead: per-chunk exclusion state versus operand ciphertexts
    lhs = encrypt_matrix(M, 4, Layout.DENSE, accept_model)
    rhs = encrypt_matrix(M, 4, Layout.DENSE, accept_model)
    operand_bytes = matrix_bytes(lhs) + matrix_bytes(rhs)
    overhead = ChunkAccumulator(accept_model, 16, 4).coordination_bytes()
    ok = ok and overhead < 0.01 * operand_bytes
    ok = ok and ChunkAccumulator(accept_model, 64, 1).coordination_bytes() == 0
    report(
        6,
        "memory-accounting",
        ok,
        f"csr/ellpack non-increasing to 0, mask constant; threading overhead "
        f"{overhead}B / {operand_bytes}B operands",
    )
    assert ok


def test_criterion_7_exact_zeros_and_error_trend(accept_model, accept_ckks):
    ok = True
    # full sparsity: transparent zeros, error exactly 0 on both engines
    Z = np.zeros((8, 8))
    for engine in (accept_model, accept_ckks):
        for scheme in (SchemeId.CSR, SchemeId.ELLPACK):
            layout = SCHEME_LAYOUT[scheme]
            lhs = encrypt_matrix(Z, 1, layout, engine)
            rhs = encrypt_matrix(Z, 1, layout, engine)
            out = decrypt_matrix(matmul(lhs, rhs, scheme, engine, threads=WORK_THREADS), engine)
            ok = ok and np.array_equal(out, Z)
    # error shrinks with sparsity on the real engine, averaged over seeds
    n_seeds = 3 if FAST else 10
    errs = {s: {0.0: [], 0.9: []} for s in SPARSE_SCHEMES}
    for seed in range(n_seeds):
        for sparsity in (0.0, 0.9):
            A, B = generate_operands(8, sparsity, operand_seed(seed + 1000, 8, sparsity, 0))
            truth = A @ B
            for scheme in SPARSE_SCHEMES:
                layout = SCHEME_LAYOUT[scheme]
                lhs = encrypt_matrix(A, 1, layout, accept_ckks)
                rhs = encrypt_matrix(B, 1, layout, accept_ckks)
                out = decrypt_matrix(
                    matmul(lhs, rhs, scheme, accept_ckks, threads=WORK_THREADS), accept_ckks
                )
                errs[scheme][sparsity].append(float(np.mean(np.abs(out - truth))))
    detail = []
    for scheme in SPARSE_SCHEMES:
        high = float(np.mean(errs[scheme][0.9]))
        low = float(np.mean(errs[scheme][0.0]))
        detail.append(f"{scheme.value}: {high:.2e} < {low:.2e}")
        ok = ok and high < low
    report(7, "exact-zeros-and-error-trend", ok, f"{n_seeds} seeds; " + "; ".join(detail))
    assert ok


def test_criterion_8_ckks_numerics(accept_ckks):
    ok = True
    # encode/decode relative error for |v| <= 1e3
    codec = accept_ckks.ring.codec
    rng = np.random.default_rng(ACCEPT_SEED)
    worst_rel = 0.0
    for _ in range(4):
        v = rng.uniform(-1000.0, 1000.0, codec.n)
        back = codec.decode(codec.encode(v, 2.0**40).astype(np.float64), 2.0**40)
        worst_rel = max(worst_rel, float(np.max(np.abs(back - v) / np.abs(v))))
    ok = ok and worst_rel < 2.0**-20

    # NTT pointwise product == schoolbook negacyclic convolution on degree-8 ring
    from test_ckks_ntt import _fwd, _inv, _tables, schoolbook_negacyclic
    from fhesparse.ckks.primes import generate_prime

    q = generate_prime(17, 16, set())
    ctx, qs = _tables(q, 8)
    ntt_ok = True
    for _ in range(50):
        f = rng.integers(0, q, 8).astype(np.uint64)
        g = rng.integers(0, q, 8).astype(np.uint64)
        ft, gt = _fwd(f, ctx, qs), _fwd(g, ctx, qs)
        ht = np.array([(int(x) * int(y)) % q for x, y in zip(ft, gt)], dtype=np.uint64)
        ntt_ok = ntt_ok and np.array_equal(_inv(ht, ctx, qs), schoolbook_negacyclic(f, g, q))
    ok = ok and ntt_ok

    # depth-2 circuit mean absolute error
    mean_errs = []
    for _ in range(4):
        x = rng.standard_normal(accept_ckks.slot_count)
        y = rng.standard_normal(accept_ckks.slot_count)
        p = accept_ckks.multiply(accept_ckks.encrypt(x), accept_ckks.encrypt(y))
        p = accept_ckks.rescale(accept_ckks.relinearize(p))
        p = accept_ckks.multiply_plain(p, np.ones(accept_ckks.slot_count))
        p = accept_ckks.rescale(accept_ckks.relinearize(p))
        mean_errs.append(float(np.mean(np.abs(accept_ckks.decrypt(p) - x * y))))
    depth2 = float(np.mean(mean_errs))
    ok = ok and depth2 < 1e-6
    report(
        8,
        "ckks-numerics",
        ok,
        f"encode rel {worst_rel:.2e} < 2^-20; ntt==schoolbook {ntt_ok}; depth-2 mean {depth2:.2e} < 1e-6",
    )
    assert ok


def test_criterion_9_determinism(accept_model):
    cfg = BenchConfig(
        sizes=(8,),
        sparsities=(0.0, 0.5, 1.0),
        schemes=tuple(SchemeId),
        thread_counts=(1, 2),
        chunk_size=1,
        engine="model",
        repeats=2,
        seed=ACCEPT_SEED,
        epsilon=EPSILON,
    )
    csvs = []
    for _ in range(2):
        records = run_suite(cfg, engine=ModelEngine())
        lines = records_csv(records).strip().split("\n")
        header = lines[0].split(",")
        runtime_col = header.index("runtime_s")
        csvs.append(
            "\n".join(
                ",".join(v for i, v in enumerate(line.split(",")) if i != runtime_col)
                for line in lines
            )
        )
        # error columns equal across thread counts within one run
        by_key = {}
        for r in records:
            by_key.setdefault((r.scheme, r.sparsity, r.repeat), []).append((r.mean_err, r.max_err))
        assert all(len(set(v)) == 1 for v in by_key.values())
    ok = csvs[0] == csvs[1]
    # byte-identical result matrices across runs and thread counts
    outs = []
    for threads in (1, 2, 3):
        eng = ModelEngine()
        A, B = generate_operands(8, 0.5, operand_seed(ACCEPT_SEED, 8, 0.5, 0))
        lhs = encrypt_matrix(A, 1, Layout.DENSE, eng)
        rhs = encrypt_matrix(B, 1, Layout.DENSE, eng)
        outs.append(decrypt_matrix(matmul(lhs, rhs, SchemeId.NAIVE_DENSE, eng, threads=threads), eng).tobytes())
    ok = ok and len(set(outs)) == 1
    report(9, "determinism", ok, "CSV identical minus runtime; result bytes identical across T")
    assert ok
