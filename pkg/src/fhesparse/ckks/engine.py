"""Leveled RNS-CKKS engine implementing the backend contract.

No bootstrapping: the prime chain fixes the rescale budget. Ciphertext
components ride in whichever domain (coefficient or NTT) the previous
operation produced; conversions happen lazily when an operation needs the
other domain. All evaluation operations are pure: inputs are never mutated
and results are fresh handles, so concurrent invocation is safe once keygen
has finished.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..engine import CiphertextHandle, HeEngine, PlainVector, as_slot_array
from ..errors import CapacityError, DepthExhaustedError
from ..params import CkksParams, DEFAULT_PARAMS
from . import nttmath
from .keys import KeyChain
from .ring import RingContext


@dataclass(frozen=True)
class _Ct:
    """Engine-owned ciphertext payload: residue matrices per component."""

    polys: tuple[np.ndarray, ...]
    is_ntt: bool


class CkksEngine(HeEngine):
    def __init__(self, params: CkksParams = DEFAULT_PARAMS, seed: int | None = None):
        super().__init__(params)
        self.ring = RingContext(params)
        rng = np.random.default_rng(seed)
        self.keychain = KeyChain(self.ring, rng)
        self._rng = rng
        self._plain_cache: dict[tuple[int, int, float], np.ndarray] = {}

    @property
    def chain(self):
        return self.ring.chain

    # -- domain helpers -------------------------------------------------------

    def _rows(self, level: int) -> np.ndarray:
        return self.ring.data_rows(level)

    def _to_ntt(self, ct: _Ct, level: int) -> _Ct:
        if ct.is_ntt:
            return ct
        rows = self._rows(level)
        return _Ct(tuple(self.ring.ntt(p.copy(), rows) for p in ct.polys), True)

    def _to_coeff(self, ct: _Ct, level: int) -> _Ct:
        if not ct.is_ntt:
            return ct
        rows = self._rows(level)
        return _Ct(tuple(self.ring.intt(p.copy(), rows) for p in ct.polys), False)

    # -- contract ---------------------------------------------------------------

    def encrypt(self, v: PlainVector) -> CiphertextHandle:
        slots = as_slot_array(v, self.slot_count)
        level = self.max_level
        rows = self._rows(level)
        ring = self.ring
        qs = ring.qs_of(rows)
        keys = self.keychain.keys

        m_res = ring.encode_vec(slots, self.params.initial_scale, rows)
        e0 = ring.residues_from_int(ring.sample_gaussian(self._rng), rows)
        nttmath.poly_add(m_res, m_res, e0, qs)
        ring.ntt(m_res, rows)

        u = ring.residues_from_int(ring.sample_ternary(self._rng), rows)
        ring.ntt(u, rows)
        e1 = ring.residues_from_int(ring.sample_gaussian(self._rng), rows)
        ring.ntt(e1, rows)

        c0 = np.empty_like(m_res)
        c1 = np.empty_like(m_res)
        nttmath.poly_mul(c0, keys.public_b[rows], u, qs)
        nttmath.poly_add(c0, c0, m_res, qs)
        nttmath.poly_mul(c1, keys.public_a[rows], u, qs)
        nttmath.poly_add(c1, c1, e1, qs)

        payload = _Ct((c0, c1), True)
        return self._handle(payload, level, self.params.initial_scale, 2)

    def decrypt(self, h: CiphertextHandle) -> np.ndarray:
        self._check_own(h)
        ct = self._to_ntt(h.payload, h.level)
        rows = self._rows(h.level)
        qs = self.ring.qs_of(rows)
        s = self.keychain.keys.secret_ntt
        acc = ct.polys[0].copy()
        tmp = np.empty_like(acc)
        nttmath.poly_mul(tmp, ct.polys[1], s[rows], qs)
        nttmath.poly_add(acc, acc, tmp, qs)
        if len(ct.polys) == 3:
            s_sq = np.empty_like(tmp)
            nttmath.poly_mul(s_sq, s[rows], s[rows], qs)
            nttmath.poly_mul(tmp, ct.polys[2], s_sq, qs)
            nttmath.poly_add(acc, acc, tmp, qs)
        self.ring.intt(acc, rows)
        return self.ring.decode_residues(acc, rows, h.scale)

    def add(self, a: CiphertextHandle, b: CiphertextHandle) -> CiphertextHandle:
        self._check_own(a, b)
        self._check_add_compat(a, b)
        rows = self._rows(a.level)
        qs = self.ring.qs_of(rows)
        ca, cb = a.payload, b.payload
        if ca.is_ntt != cb.is_ntt:
            cb = self._to_ntt(cb, b.level) if ca.is_ntt else self._to_coeff(cb, b.level)
        size = max(len(ca.polys), len(cb.polys))
        out = []
        for i in range(size):
            if i < len(ca.polys) and i < len(cb.polys):
                r = np.empty_like(ca.polys[i])
                nttmath.poly_add(r, ca.polys[i], cb.polys[i], qs)
            else:
                r = (ca.polys[i] if i < len(ca.polys) else cb.polys[i]).copy()
            out.append(r)
        payload = _Ct(tuple(out), ca.is_ntt)
        return self._handle(payload, a.level, a.scale, max(a.size_components, b.size_components))

    def multiply(self, a: CiphertextHandle, b: CiphertextHandle) -> CiphertextHandle:
        self._check_own(a, b)
        self._check_mul_compat(a, b)
        rows = self._rows(a.level)
        qs = self.ring.qs_of(rows)
        ca = self._to_ntt(a.payload, a.level)
        cb = self._to_ntt(b.payload, b.level)
        a0, a1 = ca.polys
        b0, b1 = cb.polys
        d0 = np.empty_like(a0)
        d1 = np.empty_like(a0)
        d2 = np.empty_like(a0)
        nttmath.ct_multiply(a0, a1, b0, b1, d0, d1, d2, qs)
        payload = _Ct((d0, d1, d2), True)
        return self._handle(payload, a.level, a.scale * b.scale, 3)

    def _encoded_plain(self, mask: np.ndarray, level: int) -> np.ndarray:
        """NTT-domain plaintext operand, cached per (level, content)."""
        key = (level, hash(mask.tobytes()), self.params.initial_scale)
        cached = self._plain_cache.get(key)
        if cached is None:
            rows = self._rows(level)
            res = self.ring.encode_vec(mask, self.params.initial_scale, rows)
            cached = self.ring.ntt(res, rows)
            self._plain_cache[key] = cached
        return cached

    def multiply_plain(self, a: CiphertextHandle, m: PlainVector) -> CiphertextHandle:
        self._check_own(a)
        self._check_size2(a, "multiply_plain")
        mask = as_slot_array(m, self.slot_count)
        rows = self._rows(a.level)
        qs = self.ring.qs_of(rows)
        plain = self._encoded_plain(mask, a.level)
        ca = self._to_ntt(a.payload, a.level)
        out = []
        for p in ca.polys:
            r = np.empty_like(p)
            nttmath.poly_mul(r, p, plain, qs)
            out.append(r)
        payload = _Ct(tuple(out), True)
        return self._handle(payload, a.level, a.scale * self.params.initial_scale, 2)

    def relinearize(self, a: CiphertextHandle) -> CiphertextHandle:
        self._check_own(a)
        if a.size_components == 2:
            return a
        level = a.level
        rows = self._rows(level)
        qs = self.ring.qs_of(rows)
        ct = a.payload
        if ct.is_ntt:
            d2_ntt = ct.polys[2]
            d2_coeff = self.ring.intt(d2_ntt.copy(), rows)
        else:
            d2_coeff = ct.polys[2]
            d2_ntt = None
        k0, k1 = self.keychain.key_switch(d2_coeff, level, self.keychain.keys.relin, d2_ntt)
        cc = self._to_coeff(_Ct(ct.polys[:2], ct.is_ntt), level)
        c0 = np.empty_like(k0)
        c1 = np.empty_like(k1)
        nttmath.poly_add(c0, cc.polys[0], k0, qs)
        nttmath.poly_add(c1, cc.polys[1], k1, qs)
        return self._handle(_Ct((c0, c1), False), level, a.scale, 2)

    def rescale(self, a: CiphertextHandle) -> CiphertextHandle:
        self._check_own(a)
        if a.level < 1:
            raise DepthExhaustedError("no rescale level remaining")
        level = a.level
        rows = self._rows(level)
        cc = self._to_coeff(a.payload, level)
        out = tuple(self.ring.drop_last(p, rows) for p in cc.polys)
        divisor = float(self.ring.chain.rescale_divisor(level))
        payload = _Ct(out, False)
        return self._handle(payload, level - 1, a.scale / divisor, a.size_components)

    def rotate(self, a: CiphertextHandle, steps: int) -> CiphertextHandle:
        self._check_own(a)
        self._check_size2(a, "rotate")
        if abs(steps) >= self.slot_count:
            raise CapacityError(f"|steps| must be < {self.slot_count}")
        if steps == 0:
            return a
        level = a.level
        rows = self._rows(level)
        qs = self.ring.qs_of(rows)
        two_n = 2 * self.ring.degree
        ct = self._to_coeff(a.payload, level)
        c0, c1 = ct.polys[0], ct.polys[1]
        sign = 1 if steps > 0 else -1
        remaining = abs(steps)
        t = 1
        while remaining:
            if remaining & 1:
                g = pow(5, sign * t, two_n)
                c0g = self.ring.apply_automorphism(c0, rows, g)
                c1g = self.ring.apply_automorphism(c1, rows, g)
                k0, k1 = self.keychain.key_switch(c1g, level, self.keychain.galois_key(g))
                c0 = np.empty_like(c0g)
                nttmath.poly_add(c0, c0g, k0, qs)
                c1 = k1
            remaining >>= 1
            t <<= 1
        return self._handle(_Ct((c0, c1), False), level, a.scale, 2)

    # -- internals exposed for validation ----------------------------------------

    def decrypt_with_secret(self, h: CiphertextHandle, secret_ntt: np.ndarray) -> np.ndarray:
        """Decrypt against an arbitrary secret (wrong-key sanity checks)."""
        ct = self._to_ntt(h.payload, h.level)
        rows = self._rows(h.level)
        qs = self.ring.qs_of(rows)
        acc = ct.polys[0].copy()
        tmp = np.empty_like(acc)
        nttmath.poly_mul(tmp, ct.polys[1], secret_ntt[rows], qs)
        nttmath.poly_add(acc, acc, tmp, qs)
        self.ring.intt(acc, rows)
        return self.ring.decode_residues(acc, rows, h.scale)
