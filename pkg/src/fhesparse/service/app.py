"""HTTP service wrapping the core library.

Engines (with their key material) and encrypted matrices live in an
in-memory session store keyed by opaque ids, so clients pay key generation
once and run many multiplications against the same engine. Library errors
map to HTTP 400 with the machine-readable category in the body.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..bench import BenchConfig, all_passed, generate_operands, records_csv, run_suite
from ..ckks.engine import CkksEngine
from ..engine import HeEngine
from ..errors import FheError, ParameterError
from ..matrix import (
    EncryptedMatrix,
    Layout,
    decrypt_matrix,
    encrypt_matrix,
    matrix_bytes,
    metadata_bytes,
)
from ..model_engine import ModelConfig, ModelEngine
from ..params import CkksParams
from ..schemes import SchemeId, homomorphic_op_count, matmul
from . import models

import dataclasses


@dataclass
class EngineSession:
    engine: HeEngine
    kind: str
    matrices: dict[str, EncryptedMatrix] = field(default_factory=dict)


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, EngineSession] = {}
        self._lock = threading.Lock()

    def add(self, session: EngineSession) -> str:
        engine_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._sessions[engine_id] = session
        return engine_id

    def get(self, engine_id: str) -> EngineSession:
        with self._lock:
            session = self._sessions.get(engine_id)
        if session is None:
            raise LookupError(f"unknown engine '{engine_id}'")
        return session

    def drop(self, engine_id: str) -> None:
        with self._lock:
            if engine_id not in self._sessions:
                raise LookupError(f"unknown engine '{engine_id}'")
            del self._sessions[engine_id]


def parse_scheme(name: str) -> SchemeId:
    try:
        return SchemeId(name)
    except ValueError:
        valid = ", ".join(s.value for s in SchemeId)
        raise ParameterError(f"unknown scheme '{name}' (expected one of: {valid})")


def _matrix_info(matrix_id: str, E: EncryptedMatrix) -> models.MatrixInfo:
    return models.MatrixInfo(
        matrix_id=matrix_id,
        rows=E.dims.rows,
        cols=E.dims.cols,
        layout=E.layout.value,
        chunk_size=E.chunk_layout.chunk_size,
        chunk_count=E.chunk_layout.chunk_count,
        ciphertext_bytes=matrix_bytes(E),
        metadata_bytes=metadata_bytes(E),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="fhesparse", version="0.1.0")
    store = SessionStore()

    @app.exception_handler(FheError)
    async def _fhe_error(request: Request, exc: FheError):
        return JSONResponse(
            status_code=400,
            content=models.ErrorBody(error=exc.category, detail=str(exc)).model_dump(),
        )

    @app.exception_handler(LookupError)
    async def _lookup_error(request: Request, exc: LookupError):
        return JSONResponse(
            status_code=404,
            content=models.ErrorBody(error="not-found", detail=str(exc)).model_dump(),
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": app.version}

    @app.post("/engines", response_model=models.EngineInfo)
    def create_engine(req: models.EngineCreateRequest) -> models.EngineInfo:
        params = CkksParams(
            poly_modulus_degree=req.poly_modulus_degree,
            coeff_modulus_bits=tuple(req.coeff_modulus_bits),
            initial_scale=req.initial_scale,
        )
        if req.engine == "model":
            engine: HeEngine = ModelEngine(
                ModelConfig(params=params, noise_std=req.noise_std, rng_seed=req.seed or 0)
            )
        else:
            engine = CkksEngine(params, seed=req.seed)
        engine_id = store.add(EngineSession(engine=engine, kind=req.engine))
        return models.EngineInfo(
            engine_id=engine_id,
            engine=req.engine,
            slot_count=engine.slot_count,
            max_level=engine.max_level,
        )

    @app.delete("/engines/{engine_id}")
    def drop_engine(engine_id: str) -> dict:
        store.drop(engine_id)
        return {"dropped": engine_id}

    @app.post("/engines/{engine_id}/matrices", response_model=models.MatrixInfo)
    def encrypt(engine_id: str, req: models.EncryptMatrixRequest) -> models.MatrixInfo:
        session = store.get(engine_id)
        M = np.asarray(req.values, dtype=np.float64)
        E = encrypt_matrix(M, req.chunk_size, Layout(req.layout), session.engine)
        matrix_id = uuid.uuid4().hex[:12]
        session.matrices[matrix_id] = E
        return _matrix_info(matrix_id, E)

    @app.get("/engines/{engine_id}/matrices/{matrix_id}", response_model=models.MatrixInfo)
    def matrix_info(engine_id: str, matrix_id: str) -> models.MatrixInfo:
        session = store.get(engine_id)
        if matrix_id not in session.matrices:
            raise LookupError(f"unknown matrix '{matrix_id}'")
        return _matrix_info(matrix_id, session.matrices[matrix_id])

    @app.post(
        "/engines/{engine_id}/matrices/{matrix_id}/decrypt",
        response_model=models.DecryptResponse,
    )
    def decrypt(engine_id: str, matrix_id: str) -> models.DecryptResponse:
        session = store.get(engine_id)
        if matrix_id not in session.matrices:
            raise LookupError(f"unknown matrix '{matrix_id}'")
        M = decrypt_matrix(session.matrices[matrix_id], session.engine)
        return models.DecryptResponse(values=M.tolist())

    @app.post("/engines/{engine_id}/matmul", response_model=models.MatmulResponse)
    def multiply(engine_id: str, req: models.MatmulRequest) -> models.MatmulResponse:
        session = store.get(engine_id)
        for mid in (req.lhs_id, req.rhs_id):
            if mid not in session.matrices:
                raise LookupError(f"unknown matrix '{mid}'")
        scheme = parse_scheme(req.scheme)
        lhs = session.matrices[req.lhs_id]
        rhs = session.matrices[req.rhs_id]
        counts = homomorphic_op_count(scheme, lhs, rhs)
        start = time.perf_counter()
        result = matmul(
            lhs,
            rhs,
            scheme,
            session.engine,
            threads=req.threads,
            result_chunk_size=req.result_chunk_size,
        )
        runtime = time.perf_counter() - start
        matrix_id = uuid.uuid4().hex[:12]
        session.matrices[matrix_id] = result
        return models.MatmulResponse(
            matrix=_matrix_info(matrix_id, result),
            runtime_s=runtime,
            op_counts=counts.as_dict(),
        )

    @app.post("/operands", response_model=models.OperandsResponse)
    def operands(req: models.OperandsRequest) -> models.OperandsResponse:
        A, B = generate_operands(req.size, req.sparsity, req.seed)
        return models.OperandsResponse(lhs=A.tolist(), rhs=B.tolist())

    @app.post("/bench", response_model=models.BenchResponse)
    def bench(req: models.BenchRequest) -> models.BenchResponse:
        cfg = BenchConfig(
            sizes=tuple(req.sizes),
            sparsities=tuple(req.sparsities),
            schemes=tuple(parse_scheme(s) for s in req.schemes),
            thread_counts=tuple(req.thread_counts),
            chunk_size=req.chunk_size,
            engine=req.engine,
            noise_std=req.noise_std,
            repeats=req.repeats,
            seed=req.seed,
            epsilon=req.epsilon,
        )
        records = run_suite(cfg)
        return models.BenchResponse(
            records=[dataclasses.asdict(r) for r in records],
            csv=records_csv(records),
            all_passed=all_passed(records),
        )

    return app


app = create_app()
