"""Ring arithmetic context: stacked NTT tables, RNS helpers, samplers.

Residue matrices have one row per active prime; ``rows`` arrays map matrix
rows to chain prime indices so kernels can index the stacked twiddle tables
without copying key material.
"""

from __future__ import annotations

import numpy as np

from ..errors import PrecisionError
from ..params import CkksParams
from . import nttmath
from .encoding import SlotCodec
from .primes import ModulusChain, build_prime_context


class RingContext:
    def __init__(self, params: CkksParams):
        self.params = params
        self.degree = params.poly_modulus_degree
        self.chain = ModulusChain(params)
        self.codec = SlotCodec(self.degree)
        n = self.degree
        ctxs = [build_prime_context(q, n) for q in self.chain.primes]
        self.qs_all = np.array([c.q for c in ctxs], dtype=np.uint64)
        self.q_floats_all = self.qs_all.astype(np.float64)
        self.psis = np.stack([c.psis for c in ctxs])
        self.psis_shoup = np.stack([c.psis_shoup for c in ctxs])
        self.ipsis_half = np.stack([c.ipsis_half for c in ctxs])
        self.ipsis_half_shoup = np.stack([c.ipsis_half_shoup for c in ctxs])
        self.special_index = self.chain.special_index
        self._drop_cache: dict[tuple[int, ...], tuple] = {}
        self._garner_cache: dict[tuple[int, ...], tuple] = {}
        self._auto_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    # -- row sets ---------------------------------------------------------

    def data_rows(self, level: int) -> np.ndarray:
        return np.arange(level + 1, dtype=np.int64)

    def ext_rows(self, level: int) -> np.ndarray:
        return np.append(np.arange(level + 1, dtype=np.int64), self.special_index)

    def qs_of(self, rows: np.ndarray) -> np.ndarray:
        return self.qs_all[rows]

    # -- NTT domain conversions (in place) ---------------------------------

    def ntt(self, res: np.ndarray, rows: np.ndarray) -> np.ndarray:
        nttmath.ntt_forward(res, self.psis, self.psis_shoup, self.qs_all, rows)
        return res

    def intt(self, res: np.ndarray, rows: np.ndarray) -> np.ndarray:
        nttmath.ntt_inverse(res, self.ipsis_half, self.ipsis_half_shoup, self.qs_all, rows)
        return res

    # -- encode / decode ----------------------------------------------------

    def residues_from_int(self, coeffs: np.ndarray, rows: np.ndarray) -> np.ndarray:
        out = np.empty((len(rows), self.degree), dtype=np.uint64)
        for r, row in enumerate(rows):
            out[r] = (coeffs % np.int64(self.qs_all[row])).astype(np.uint64)
        return out

    def encode_vec(self, slots: np.ndarray, scale: float, rows: np.ndarray) -> np.ndarray:
        """Encode real slots into coefficient-domain residues over ``rows``."""
        coeffs = self.codec.encode(slots, scale)
        bound = int(np.max(np.abs(coeffs)))
        modulus = 1
        for row in rows:
            modulus *= int(self.qs_all[row])
        if 2 * bound >= modulus:
            raise PrecisionError("encoded coefficients exceed the active modulus")
        return self.residues_from_int(coeffs, rows)

    def _garner_precomp(self, rows_key: tuple[int, ...]):
        pre = self._garner_cache.get(rows_key)
        if pre is None:
            qs = [int(self.qs_all[r]) for r in rows_key]
            k = len(qs)
            pp = np.zeros((k, k), dtype=np.uint64)
            inv_pp = np.zeros(k, dtype=np.uint64)
            w_floats = np.zeros(k, dtype=np.float64)
            for m in range(k):
                w = 1
                for t in range(m):
                    w *= qs[t]
                w_floats[m] = float(w)
                for i in range(k):
                    pp[m, i] = w % qs[i]
                if m > 0:
                    inv_pp[m] = pow(w % qs[m], -1, qs[m])
            inv_pp[0] = 1
            pre = (
                np.array(qs, dtype=np.uint64),
                pp,
                inv_pp,
                np.array(qs, dtype=np.float64),
                w_floats,
            )
            self._garner_cache[rows_key] = pre
        return pre

    def decode_residues(self, res: np.ndarray, rows: np.ndarray, scale: float) -> np.ndarray:
        """Coefficient-domain residues -> real slot values."""
        qs, pp, inv_pp, q_floats, w_floats = self._garner_precomp(tuple(int(r) for r in rows))
        coeffs = np.empty(self.degree, dtype=np.float64)
        nttmath.garner_centered_float(res, qs, pp, inv_pp, q_floats, w_floats, coeffs)
        return self.codec.decode(coeffs, scale)

    # -- dropping a prime (rescale / key-switch mod-down) -------------------

    def drop_last(self, res: np.ndarray, rows: np.ndarray) -> np.ndarray:
        """Rounded exact division by the last row's prime (coefficient domain)."""
        rows_key = tuple(int(r) for r in rows)
        pre = self._drop_cache.get(rows_key)
        if pre is None:
            q_last = int(self.qs_all[rows_key[-1]])
            keep = rows_key[:-1]
            qs = np.array([self.qs_all[r] for r in rows_key], dtype=np.uint64)
            last_mod = np.array([q_last % int(self.qs_all[r]) for r in keep], dtype=np.uint64)
            inv_last = np.array(
                [pow(q_last, -1, int(self.qs_all[r])) for r in keep], dtype=np.uint64
            )
            pre = (qs, last_mod, inv_last, np.uint64(q_last // 2))
            self._drop_cache[rows_key] = pre
        qs, last_mod, inv_last, half = pre
        out = np.empty((res.shape[0] - 1, self.degree), dtype=np.uint64)
        nttmath.drop_last_prime(res, qs, last_mod, inv_last, half, out)
        return out

    # -- Galois automorphisms ------------------------------------------------

    def automorphism_maps(self, g: int) -> tuple[np.ndarray, np.ndarray]:
        maps = self._auto_cache.get(g)
        if maps is None:
            n = self.degree
            j = np.arange(n, dtype=np.int64)
            t = (j * g) % (2 * n)
            index_map = np.where(t < n, t, t - n)
            flip = (t >= n).astype(np.uint8)
            maps = (index_map, flip)
            self._auto_cache[g] = maps
        return maps

    def apply_automorphism(self, res: np.ndarray, rows: np.ndarray, g: int) -> np.ndarray:
        index_map, flip = self.automorphism_maps(g)
        out = np.empty_like(res)
        nttmath.automorphism(out, res, index_map, flip, self.qs_of(rows))
        return out

    # -- samplers --------------------------------------------------------------

    def sample_ternary(self, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(-1, 2, self.degree, dtype=np.int64)

    def sample_gaussian(self, rng: np.random.Generator, sigma: float = 3.2) -> np.ndarray:
        raw = np.rint(rng.normal(0.0, sigma, self.degree)).astype(np.int64)
        bound = int(np.ceil(6 * sigma))
        return np.clip(raw, -bound, bound)

    def sample_uniform_ntt(self, rng: np.random.Generator, rows: np.ndarray) -> np.ndarray:
        out = np.empty((len(rows), self.degree), dtype=np.uint64)
        for r, row in enumerate(rows):
            out[r] = rng.integers(0, int(self.qs_all[row]), self.degree, dtype=np.uint64)
        return out
