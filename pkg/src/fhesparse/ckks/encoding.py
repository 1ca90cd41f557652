"""Canonical-embedding slot codec.

Slots live at the primitive 2N-th roots of unity indexed by powers of five,
so a cyclic slot rotation corresponds to the Galois map X -> X^(5^r). Encode
evaluates the inverse embedding with an iterative special FFT, scales,
and rounds to integer coefficients; decode is the exact reverse.
"""

from __future__ import annotations

import numpy as np

from ..errors import PrecisionError

_MAX_COEFF = 2**62  # headroom for exact int64 coefficients


class SlotCodec:
    def __init__(self, poly_degree: int):
        self.degree = poly_degree
        self.n = poly_degree // 2  # slot count
        self.m = 2 * poly_degree
        logn = self.n.bit_length() - 1
        rev = np.zeros(self.n, dtype=np.int64)
        for i in range(self.n):
            r = 0
            x = i
            for _ in range(logn):
                r = (r << 1) | (x & 1)
                x >>= 1
            rev[i] = r
        self._bitrev = rev
        rot = np.zeros(self.n, dtype=np.int64)
        g = 1
        for i in range(self.n):
            rot[i] = g
            g = (g * 5) % self.m
        self._rot_group = rot
        self._fwd_tw: dict[int, np.ndarray] = {}
        self._inv_tw: dict[int, np.ndarray] = {}

    def _stage_twiddles(self, length: int) -> np.ndarray:
        tw = self._fwd_tw.get(length)
        if tw is None:
            lenh, lenq = length >> 1, length << 2
            idx = (self._rot_group[:lenh] % lenq) * (self.m // lenq)
            tw = np.exp(2j * np.pi * idx / self.m)
            self._fwd_tw[length] = tw
            self._inv_tw[length] = np.conj(tw)
        return tw

    def _embed(self, vals: np.ndarray) -> np.ndarray:
        """Special FFT: coefficients-as-complex-pairs -> slot values."""
        vals = vals[self._bitrev]
        length = 2
        while length <= self.n:
            tw = self._stage_twiddles(length)
            h = length >> 1
            v = vals.reshape(-1, length)
            t = v[:, h:] * tw
            u = v[:, :h].copy()
            v[:, :h] = u + t
            v[:, h:] = u - t
            length <<= 1
        return vals

    def _embed_inv(self, vals: np.ndarray) -> np.ndarray:
        vals = vals.astype(np.complex128, copy=True)
        length = self.n
        while length >= 2:
            self._stage_twiddles(length)
            tw = self._inv_tw[length]
            h = length >> 1
            v = vals.reshape(-1, length)
            u = v[:, :h] + v[:, h:]
            t = (v[:, :h] - v[:, h:]) * tw
            v[:, :h] = u
            v[:, h:] = t
            length >>= 1
        return vals[self._bitrev] / self.n

    def encode(self, slots: np.ndarray, scale: float) -> np.ndarray:
        """Real slot values -> integer coefficient vector (length N)."""
        z = np.zeros(self.n, dtype=np.complex128)
        z[: len(slots)] = slots
        u = self._embed_inv(z)
        coeffs = np.concatenate([u.real, u.imag]) * scale
        rounded = np.rint(coeffs)
        if np.max(np.abs(rounded)) >= _MAX_COEFF:
            raise PrecisionError("encoded coefficients overflow the modulus chain")
        return rounded.astype(np.int64)

    def decode(self, coeffs: np.ndarray, scale: float) -> np.ndarray:
        """Centered float coefficient vector (length N) -> real slot values."""
        c = (coeffs[: self.n] + 1j * coeffs[self.n :]) / scale
        return self._embed(c).real

    def eval_at_root(self, coeffs: np.ndarray, slot: int) -> complex:
        """Brute-force polynomial evaluation at the slot's root (oracle)."""
        power = self._rot_group[slot]
        exps = np.exp(1j * np.pi * (np.arange(self.degree) * power % self.m) / self.degree)
        return complex(np.dot(coeffs.astype(np.complex128), exps))
