"""Request/response schemas for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class EngineCreateRequest(BaseModel):
    engine: Literal["model", "ckks"] = "model"
    poly_modulus_degree: int = 8192
    coeff_modulus_bits: list[int] = Field(default=[50, 40, 40, 40, 40])
    initial_scale: float = 2.0**40
    seed: Optional[int] = None
    noise_std: float = 0.0


class EngineInfo(BaseModel):
    engine_id: str
    engine: str
    slot_count: int
    max_level: int


class EncryptMatrixRequest(BaseModel):
    values: list[list[float]]
    layout: Literal["dense", "binary_mask", "csr", "ellpack"] = "dense"
    chunk_size: int = 1


class MatrixInfo(BaseModel):
    matrix_id: str
    rows: int
    cols: int
    layout: str
    chunk_size: int
    chunk_count: int
    ciphertext_bytes: int
    metadata_bytes: int


class MatmulRequest(BaseModel):
    lhs_id: str
    rhs_id: str
    scheme: str = "dense"
    threads: int = 1
    result_chunk_size: Optional[int] = None


class MatmulResponse(BaseModel):
    matrix: MatrixInfo
    runtime_s: float
    op_counts: dict[str, int]


class DecryptResponse(BaseModel):
    values: list[list[float]]


class OperandsRequest(BaseModel):
    size: int
    sparsity: float = 0.0
    seed: int = 0


class OperandsResponse(BaseModel):
    lhs: list[list[float]]
    rhs: list[list[float]]


class BenchRequest(BaseModel):
    sizes: list[int] = [8]
    sparsities: list[float] = [round(0.1 * i, 1) for i in range(11)]
    schemes: list[str] = ["dense", "naive", "csr", "ellpack"]
    thread_counts: list[int] = [1]
    chunk_size: int = 1
    engine: Literal["model", "ckks"] = "model"
    noise_std: float = 0.0
    repeats: int = 3
    seed: int = 0
    epsilon: float = 1e-3


class BenchResponse(BaseModel):
    records: list[dict]
    csv: str
    all_passed: bool


class ErrorBody(BaseModel):
    error: str
    detail: str
