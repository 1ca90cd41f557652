"""Benchmark harness: operand generation, plaintext validation, timed runs.

The profiling procedure per configuration cell: generate Gaussian operands
with the requested sparsity, validate every sparse algorithm against the
double-precision dense product in plaintext, run the encrypted multiply
under a monotonic timer (context setup, encryption and decryption excluded),
then decrypt and verify every element against the dense oracle within epsilon.
"""

from __future__ import annotations

import dataclasses
import json
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .ckks.engine import CkksEngine
from .engine import HeEngine
from .errors import FheError, ParameterError
from .matrix import encrypt_matrix, decrypt_matrix, matrix_bytes, metadata_bytes
from .model_engine import ModelConfig, ModelEngine
from .params import CkksParams, DEFAULT_PARAMS
from .schemes import SCHEME_LAYOUT, SchemeId, homomorphic_op_count, matmul

DEFAULT_SPARSITIES = tuple(round(0.1 * i, 1) for i in range(11))

CSV_COLUMNS = (
    "scheme,size,sparsity,threads,chunk_size,engine,repeat,"
    "runtime_s,ct_bytes,meta_bytes,mean_err,max_err,pass"
)


@dataclass(frozen=True)
class BenchConfig:
    sizes: tuple[int, ...] = (8,)
    sparsities: tuple[float, ...] = DEFAULT_SPARSITIES
    schemes: tuple[SchemeId, ...] = tuple(SchemeId)
    thread_counts: tuple[int, ...] = (1,)
    chunk_size: int = 1
    engine: str = "ckks"
    noise_std: float = 0.0
    repeats: int = 3
    seed: int = 0
    epsilon: float = 1e-3
    params: CkksParams = DEFAULT_PARAMS

    def __post_init__(self):
        if self.repeats < 1:
            raise ParameterError("repeats must be >= 1")
        for s in self.sparsities:
            if not 0.0 <= s <= 1.0:
                raise ParameterError(f"sparsity {s} outside [0, 1]")
        if self.engine not in ("model", "ckks"):
            raise ParameterError(f"unknown engine '{self.engine}'")


@dataclass
class BenchRecord:
    scheme: str
    size: int
    sparsity: float
    threads: int
    chunk_size: int
    engine: str
    repeat: int
    runtime_s: float
    ct_bytes: int
    meta_bytes: int
    mean_err: float
    max_err: float
    passed: bool
    op_counts: dict[str, int] = field(default_factory=dict)

    def csv_row(self) -> str:
        return ",".join(
            [
                self.scheme,
                str(self.size),
                repr(self.sparsity),
                str(self.threads),
                str(self.chunk_size),
                self.engine,
                str(self.repeat),
                repr(self.runtime_s),
                str(self.ct_bytes),
                str(self.meta_bytes),
                repr(self.mean_err),
                repr(self.max_err),
                str(self.passed),
            ]
        )


def make_engine(cfg: BenchConfig) -> HeEngine:
    if cfg.engine == "model":
        return ModelEngine(ModelConfig(params=cfg.params, noise_std=cfg.noise_std, rng_seed=cfg.seed))
    return CkksEngine(cfg.params, seed=cfg.seed)


def operand_seed(base_seed: int, size: int, sparsity: float, repeat: int) -> np.random.SeedSequence:
    """Deterministic per-cell seed; schemes within a cell share operands."""
    return np.random.SeedSequence(
        entropy=base_seed, spawn_key=(size, int(round(sparsity * 1000)), repeat)
    )


def generate_operands(
    n: int, sparsity: float, seed: Union[int, np.random.SeedSequence]
) -> tuple[np.ndarray, np.ndarray]:
    """Two n x n standard-Gaussian matrices with floor(s*n^2) zeroed positions each."""
    if not 0.0 <= sparsity <= 1.0:
        raise ParameterError(f"sparsity {sparsity} outside [0, 1]")
    rng = np.random.default_rng(seed)
    zeros = int(sparsity * n * n)
    out = []
    for _ in range(2):
        M = rng.standard_normal((n, n))
        if zeros:
            idx = rng.choice(n * n, size=zeros, replace=False)
            M.ravel()[idx] = 0.0
        out.append(M)
    return out[0], out[1]


def _plaintext_sparse(A: np.ndarray, B: np.ndarray, scheme: SchemeId) -> np.ndarray:
    """Plaintext replica of a sparse scheme's traversal (ascending k)."""
    n, m, shared = A.shape[0], B.shape[1], A.shape[1]
    out = np.zeros((n, m))
    if scheme is SchemeId.NAIVE_SPARSE:
        zl, zr = A == 0.0, B == 0.0
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k in range(shared):
                    if not (zl[i, k] or zr[k, j]):
                        acc += A[i, k] * B[k, j]
                out[i, j] = acc
        return out
    if scheme is SchemeId.CSR:
        rows_a = [np.nonzero(A[i])[0] for i in range(n)]
        rows_b = [set(np.nonzero(B[k])[0]) for k in range(shared)]
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k in rows_a[i]:
                    if j in rows_b[k]:
                        acc += A[i, k] * B[k, j]
                out[i, j] = acc
        return out
    if scheme is SchemeId.ELLPACK:
        cols_a = [list(np.nonzero(A[i])[0]) for i in range(n)]
        cols_b = [list(np.nonzero(B[k])[0]) for k in range(shared)]
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k in cols_a[i]:
                    if j in cols_b[k]:
                        acc += A[i, k] * B[k, j]
                out[i, j] = acc
        return out
    raise ParameterError(f"no plaintext sparse replica for {scheme}")


def plaintext_oracles(A: np.ndarray, B: np.ndarray) -> dict[str, np.ndarray]:
    """Dense double-precision ground truth plus each sparse algorithm in plaintext.

    Any sparse replica drifting beyond 1e-12 from the dense product is an
    algorithm bug and aborts the run before touching the engines.
    """
    if A.shape[1] != B.shape[0]:
        raise FheError(f"operand shapes {A.shape} and {B.shape} do not conform")
    dense = A.astype(np.float64) @ B.astype(np.float64)
    oracles = {"dense": dense}
    for scheme in (SchemeId.NAIVE_SPARSE, SchemeId.CSR, SchemeId.ELLPACK):
        got = _plaintext_sparse(A, B, scheme)
        drift = float(np.max(np.abs(got - dense))) if dense.size else 0.0
        if drift > 1e-12:
            raise FheError(
                f"plaintext {scheme.value} disagrees with dense product by {drift:.3e}"
            )
        oracles[scheme.value] = got
    return oracles


def run_suite(cfg: BenchConfig, engine: Optional[HeEngine] = None) -> list[BenchRecord]:
    engine = engine or make_engine(cfg)
    records: list[BenchRecord] = []
    for size in cfg.sizes:
        for sparsity in cfg.sparsities:
            for repeat in range(cfg.repeats):
                A, B = generate_operands(size, sparsity, operand_seed(cfg.seed, size, sparsity, repeat))
                truth = plaintext_oracles(A, B)["dense"]
                for scheme in cfg.schemes:
                    layout = SCHEME_LAYOUT[scheme]
                    lhs = encrypt_matrix(A, cfg.chunk_size, layout, engine)
                    rhs = encrypt_matrix(B, cfg.chunk_size, layout, engine)
                    counts = homomorphic_op_count(scheme, lhs, rhs).as_dict()
                    ct_bytes = matrix_bytes(lhs) + matrix_bytes(rhs)
                    meta_bytes = metadata_bytes(lhs) + metadata_bytes(rhs)
                    for threads in cfg.thread_counts:
                        start = time.perf_counter()
                        result = matmul(lhs, rhs, scheme, engine, threads=threads)
                        runtime = time.perf_counter() - start
                        decrypted = decrypt_matrix(result, engine)
                        err = np.abs(decrypted - truth)
                        mean_err = float(np.mean(err))
                        max_err = float(np.max(err))
                        records.append(
                            BenchRecord(
                                scheme=scheme.value,
                                size=size,
                                sparsity=sparsity,
                                threads=threads,
                                chunk_size=cfg.chunk_size,
                                engine=cfg.engine,
                                repeat=repeat,
                                runtime_s=runtime,
                                ct_bytes=ct_bytes,
                                meta_bytes=meta_bytes,
                                mean_err=mean_err,
                                max_err=max_err,
                                passed=bool(max_err < cfg.epsilon),
                                op_counts=counts,
                            )
                        )
    return records


def records_csv(records: list[BenchRecord]) -> str:
    lines = [CSV_COLUMNS]
    lines += [r.csv_row() for r in records]
    return "\n".join(lines) + "\n"


def environment_stanza() -> dict:
    import numpy

    return {
        "python": sys.version.split()[0],
        "numpy": numpy.__version__,
        "platform": platform.platform(),
        "cpu_count": __import__("os").cpu_count(),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }


def emit_report(records: list[BenchRecord], cfg: BenchConfig, out_base: str) -> tuple[Path, Path]:
    """Write <out>.csv and <out>.json; returns both paths."""
    if not records:
        raise FheError("no records to emit")
    base = Path(out_base)
    base.parent.mkdir(parents=True, exist_ok=True)
    csv_path = base.with_suffix(".csv")
    json_path = base.with_suffix(".json")
    csv_path.write_text(records_csv(records))
    cfg_dict = dataclasses.asdict(cfg)
    cfg_dict["schemes"] = [s.value for s in cfg.schemes]
    cfg_dict["params"] = dataclasses.asdict(cfg.params)
    doc = {
        "config": cfg_dict,
        "environment": environment_stanza(),
        "records": [dataclasses.asdict(r) for r in records],
    }
    json_path.write_text(json.dumps(doc, indent=2) + "\n")
    return csv_path, json_path


def all_passed(records: list[BenchRecord]) -> bool:
    return all(r.passed for r in records)
