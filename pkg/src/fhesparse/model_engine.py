"""Exact-arithmetic reference engine.

Slot values are plain float64 vectors; level, scale and component-count
bookkeeping follow the same rules as the real CKKS engine (including scale
division by the actual chain primes), so operation traces behave
identically on both backends. Optional Gaussian noise can be injected after
the key-switching operations (multiply, relinearize, rotate) to emulate
where CKKS noise actually grows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ckks.primes import ModulusChain
from .engine import CiphertextHandle, HeEngine, PlainVector, as_slot_array
from .errors import CapacityError, DepthExhaustedError
from .params import CkksParams, DEFAULT_PARAMS


@dataclass(frozen=True)
class ModelConfig:
    params: CkksParams = DEFAULT_PARAMS
    noise_std: float = 0.0
    rng_seed: int = 0


def _mix(*parts: int) -> int:
    """Stable 64-bit hash combine for per-operation noise streams."""
    h = 0xCBF29CE484222325
    for part in parts:
        for b in int(part & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little"):
            h ^= b
            h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


class _Slots:
    """Engine-owned payload: slot values plus a noise-derivation key."""

    __slots__ = ("values", "noise_key")

    def __init__(self, values: np.ndarray, noise_key: int):
        self.values = values
        self.noise_key = noise_key


class ModelEngine(HeEngine):
    def __init__(self, config: ModelConfig | None = None, **kwargs):
        if config is None:
            config = ModelConfig(**kwargs)
        super().__init__(config.params)
        self.config = config
        self.chain = ModulusChain(config.params)
        self._encrypt_serial = 0

    # Noise is derived from a per-handle key so concurrent evaluation of a
    # fixed operand assignment is deterministic regardless of interleaving.
    def _noise(self, key: int, values: np.ndarray) -> np.ndarray:
        if self.config.noise_std <= 0:
            return values
        rng = np.random.default_rng(_mix(self.config.rng_seed, key))
        return values + rng.normal(0.0, self.config.noise_std, values.shape)

    def encrypt(self, v: PlainVector) -> CiphertextHandle:
        values = as_slot_array(v, self.slot_count)
        self._encrypt_serial += 1
        key = _mix(0xE0C, self._encrypt_serial)
        return self._handle(_Slots(values, key), self.max_level, self.params.initial_scale, 2)

    def decrypt(self, h: CiphertextHandle) -> np.ndarray:
        self._check_own(h)
        return h.payload.values.copy()

    def add(self, a: CiphertextHandle, b: CiphertextHandle) -> CiphertextHandle:
        self._check_own(a, b)
        self._check_add_compat(a, b)
        key = _mix(0xADD, a.payload.noise_key, b.payload.noise_key)
        payload = _Slots(a.payload.values + b.payload.values, key)
        return self._handle(payload, a.level, a.scale, a.size_components)

    def multiply(self, a: CiphertextHandle, b: CiphertextHandle) -> CiphertextHandle:
        self._check_own(a, b)
        self._check_mul_compat(a, b)
        key = _mix(0x3A1, a.payload.noise_key, b.payload.noise_key)
        values = self._noise(key, a.payload.values * b.payload.values)
        return self._handle(_Slots(values, key), a.level, a.scale * b.scale, 3)

    def multiply_plain(self, a: CiphertextHandle, m: PlainVector) -> CiphertextHandle:
        self._check_own(a)
        self._check_size2(a, "multiply_plain")
        mask = as_slot_array(m, self.slot_count)
        key = _mix(0x3A9, a.payload.noise_key)
        payload = _Slots(a.payload.values * mask, key)
        return self._handle(payload, a.level, a.scale * self.params.initial_scale, 2)

    def relinearize(self, a: CiphertextHandle) -> CiphertextHandle:
        self._check_own(a)
        if a.size_components == 2:
            return a
        key = _mix(0x4E1, a.payload.noise_key)
        values = self._noise(key, a.payload.values)
        return self._handle(_Slots(values, key), a.level, a.scale, 2)

    def rescale(self, a: CiphertextHandle) -> CiphertextHandle:
        self._check_own(a)
        if a.level < 1:
            raise DepthExhaustedError("no rescale level remaining")
        divisor = float(self.chain.rescale_divisor(a.level))
        key = _mix(0x4E5, a.payload.noise_key)
        payload = _Slots(a.payload.values.copy(), key)
        return self._handle(payload, a.level - 1, a.scale / divisor, a.size_components)

    def rotate(self, a: CiphertextHandle, steps: int) -> CiphertextHandle:
        self._check_own(a)
        self._check_size2(a, "rotate")
        if abs(steps) >= self.slot_count:
            raise CapacityError(f"|steps| must be < {self.slot_count}")
        if steps == 0:
            return a
        key = _mix(0x407, a.payload.noise_key, steps & 0xFFFFFFFF)
        values = self._noise(key, np.roll(a.payload.values, -steps))
        return self._handle(_Slots(values, key), a.level, a.scale, 2)
