"""Sparse matrix multiplication under leveled CKKS homomorphic encryption."""

from .bench import (
    BenchConfig,
    BenchRecord,
    emit_report,
    generate_operands,
    plaintext_oracles,
    run_suite,
)
from .ckks.engine import CkksEngine
from .engine import CiphertextHandle, HeEngine
from .errors import FheError
from .matrix import (
    EncryptedMatrix,
    Layout,
    decrypt_matrix,
    element_locator,
    encrypt_matrix,
    matrix_bytes,
    metadata_bytes,
)
from .model_engine import ModelConfig, ModelEngine
from .params import CkksParams, DEFAULT_PARAMS
from .schemes import SchemeId, compute_element, contributions_for, homomorphic_op_count, matmul

__version__ = "0.1.0"

__all__ = [
    "BenchConfig",
    "BenchRecord",
    "CiphertextHandle",
    "CkksEngine",
    "CkksParams",
    "DEFAULT_PARAMS",
    "EncryptedMatrix",
    "FheError",
    "HeEngine",
    "Layout",
    "ModelConfig",
    "ModelEngine",
    "SchemeId",
    "compute_element",
    "contributions_for",
    "decrypt_matrix",
    "element_locator",
    "emit_report",
    "encrypt_matrix",
    "generate_operands",
    "homomorphic_op_count",
    "matmul",
    "matrix_bytes",
    "metadata_bytes",
    "plaintext_oracles",
    "run_suite",
]
