"""Backend-neutral engine contract.

Every homomorphic backend (the exact model engine and the real CKKS engine)
implements :class:`HeEngine`. Handles are immutable bookkeeping records
around an engine-owned payload; all evaluation operations are pure and
return fresh handles, so they are safe to call concurrently.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Sequence, Union

import numpy as np

from .errors import (
    CapacityError,
    ComponentSizeError,
    EngineMismatchError,
    LevelMismatchError,
    ScaleMismatchError,
)
from .params import CkksParams

PlainVector = Union[Sequence[float], np.ndarray]

# Relative tolerance when adding ciphertexts whose scales went through the
# same prime chain; bit-identical in practice, the tolerance guards callers
# that mix engines or chains.
SCALE_RTOL = 2.0**-20

_engine_counter = itertools.count()


@dataclass(frozen=True)
class CiphertextHandle:
    """Opaque encrypted slot vector with level/scale/size bookkeeping."""

    engine_id: int
    payload: Any
    level: int
    scale: float
    size_components: int
    byte_size: int


def ciphertext_byte_size(params: CkksParams, level: int, size_components: int) -> int:
    """Serialized-size model: components x active primes x degree x 8 bytes.

    A fresh ciphertext counts the whole modulus chain (the key-switch prime
    is still live); each rescale retires one prime. Both engines report
    through this model so memory curves are comparable.
    """
    active_primes = level + 2
    return size_components * active_primes * params.poly_modulus_degree * 8


def as_slot_array(v: PlainVector, slot_count: int) -> np.ndarray:
    """Validate and zero-pad a plain vector to the full slot width."""
    arr = np.asarray(v, dtype=np.float64).ravel()
    if arr.size > slot_count:
        raise CapacityError(f"vector of length {arr.size} exceeds {slot_count} slots")
    out = np.zeros(slot_count, dtype=np.float64)
    out[: arr.size] = arr
    return out


class HeEngine(ABC):
    """Contract implemented by every homomorphic engine."""

    def __init__(self, params: CkksParams):
        self.params = params
        self.engine_id = next(_engine_counter)

    @property
    def slot_count(self) -> int:
        return self.params.slot_count

    @property
    def max_level(self) -> int:
        return self.params.max_level

    # -- shared precondition checks -------------------------------------

    def _check_own(self, *handles: CiphertextHandle) -> None:
        for h in handles:
            if h.engine_id != self.engine_id:
                raise EngineMismatchError(
                    f"handle from engine {h.engine_id} used with engine {self.engine_id}"
                )

    def _check_add_compat(self, a: CiphertextHandle, b: CiphertextHandle) -> None:
        if a.level != b.level:
            raise LevelMismatchError(f"levels {a.level} != {b.level}")
        ref = max(abs(a.scale), abs(b.scale))
        if abs(a.scale - b.scale) > SCALE_RTOL * ref:
            raise ScaleMismatchError(f"scales {a.scale} and {b.scale} differ beyond tolerance")

    def _check_mul_compat(self, a: CiphertextHandle, b: CiphertextHandle) -> None:
        if a.level != b.level:
            raise LevelMismatchError(f"levels {a.level} != {b.level}")
        if a.size_components != 2 or b.size_components != 2:
            raise ComponentSizeError("multiply requires 2-component (relinearized) inputs")

    def _check_size2(self, a: CiphertextHandle, op: str) -> None:
        if a.size_components != 2:
            raise ComponentSizeError(f"{op} requires a 2-component ciphertext")

    def _handle(self, payload: Any, level: int, scale: float, size: int) -> CiphertextHandle:
        return CiphertextHandle(
            engine_id=self.engine_id,
            payload=payload,
            level=level,
            scale=scale,
            size_components=size,
            byte_size=ciphertext_byte_size(self.params, level, size),
        )

    # -- contract operations ---------------------------------------------

    @abstractmethod
    def encrypt(self, v: PlainVector) -> CiphertextHandle: ...

    @abstractmethod
    def decrypt(self, h: CiphertextHandle) -> np.ndarray: ...

    @abstractmethod
    def add(self, a: CiphertextHandle, b: CiphertextHandle) -> CiphertextHandle: ...

    @abstractmethod
    def multiply(self, a: CiphertextHandle, b: CiphertextHandle) -> CiphertextHandle: ...

    @abstractmethod
    def multiply_plain(self, a: CiphertextHandle, m: PlainVector) -> CiphertextHandle: ...

    @abstractmethod
    def relinearize(self, a: CiphertextHandle) -> CiphertextHandle: ...

    @abstractmethod
    def rescale(self, a: CiphertextHandle) -> CiphertextHandle: ...

    @abstractmethod
    def rotate(self, a: CiphertextHandle, steps: int) -> CiphertextHandle: ...

    def ciphertext_bytes(self, a: CiphertextHandle) -> int:
        self._check_own(a)
        return a.byte_size
