"""Key generation and hybrid key switching.

Key-switch keys carry one entry per data prime (RNS digit); each entry is an
RLWE pair over the full chain plus the special prime. Switching raises the
digit decomposition to the extended basis, multiplies by the key, and scales
the result back down by the special prime, so per-switch noise stays at the
few-bits level regardless of ciphertext modulus size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import RotationKeyError
from . import nttmath
from .ring import RingContext


@dataclass
class KeySwitchKey:
    b: np.ndarray  # (digits, chain_rows, N) uint64, NTT domain
    a: np.ndarray


@dataclass
class KeySet:
    secret_ntt: np.ndarray  # (chain_rows, N) NTT domain
    public_b: np.ndarray  # (data_rows, N) NTT domain
    public_a: np.ndarray
    relin: KeySwitchKey
    galois: dict[int, KeySwitchKey] = field(default_factory=dict)

    def key_bytes(self) -> bytes:
        """Stable serialization of all key material (determinism checks)."""
        parts = [self.secret_ntt.tobytes(), self.public_b.tobytes(), self.public_a.tobytes()]
        parts += [self.relin.b.tobytes(), self.relin.a.tobytes()]
        for g in sorted(self.galois):
            parts += [self.galois[g].b.tobytes(), self.galois[g].a.tobytes()]
        return b"".join(parts)


class KeyChain:
    """Owns the key material for one engine and applies key switches."""

    def __init__(self, ring: RingContext, rng: np.random.Generator):
        self.ring = ring
        self._rng = rng
        d = ring.special_index  # number of data primes
        self.num_digits = d
        self.all_rows = np.arange(d + 1, dtype=np.int64)
        self.data_rows_full = np.arange(d, dtype=np.int64)
        p_sp = int(ring.qs_all[ring.special_index])
        self.p_mod_qi = np.array(
            [p_sp % int(ring.qs_all[i]) for i in range(d)], dtype=np.uint64
        )
        self.keys = self._keygen()

    # -- generation -----------------------------------------------------------

    def _rlwe_pair(self, rows: np.ndarray, secret_ntt: np.ndarray):
        """Sample (b, a) with b = -a*s + e over ``rows``, NTT domain."""
        ring = self.ring
        a = ring.sample_uniform_ntt(self._rng, rows)
        e = ring.residues_from_int(ring.sample_gaussian(self._rng), rows)
        ring.ntt(e, rows)
        qs = ring.qs_of(rows)
        b = np.empty_like(a)
        nttmath.poly_mul(b, a, secret_ntt[rows], qs)
        nttmath.poly_neg(b, b, qs)
        nttmath.poly_add(b, b, e, qs)
        return b, a

    def _make_ksk(self, source_ntt: np.ndarray, secret_ntt: np.ndarray) -> KeySwitchKey:
        """Key switching from ``source`` to the engine secret.

        ``source_ntt`` holds the source key over the data rows. Digit i's
        entry folds (q_special mod q_i) * source into its own residue row,
        which is the RNS unit vector scaled by the special prime.
        """
        ring = self.ring
        d = self.num_digits
        n = ring.degree
        ks_b = np.empty((d, d + 1, n), dtype=np.uint64)
        ks_a = np.empty((d, d + 1, n), dtype=np.uint64)
        for i in range(d):
            b, a = self._rlwe_pair(self.all_rows, secret_ntt)
            qi = np.uint64(ring.qs_all[i])
            row = np.empty((1, n), dtype=np.uint64)
            nttmath.poly_scalar_mul(
                row, source_ntt[i : i + 1], self.p_mod_qi[i : i + 1], np.array([qi])
            )
            nttmath.poly_add(b[i : i + 1], b[i : i + 1], row, np.array([qi]))
            ks_b[i] = b
            ks_a[i] = a
        return KeySwitchKey(b=ks_b, a=ks_a)

    def _keygen(self) -> KeySet:
        ring = self.ring
        s_coeff = ring.sample_ternary(self._rng)
        s_res = ring.residues_from_int(s_coeff, self.all_rows)
        secret_ntt = ring.ntt(s_res, self.all_rows)

        public_b, public_a = self._rlwe_pair(self.data_rows_full, secret_ntt)

        s_sq = np.empty((self.num_digits, ring.degree), dtype=np.uint64)
        nttmath.poly_mul(
            s_sq,
            secret_ntt[self.data_rows_full],
            secret_ntt[self.data_rows_full],
            ring.qs_of(self.data_rows_full),
        )
        relin = self._make_ksk(s_sq, secret_ntt)

        keys = KeySet(
            secret_ntt=secret_ntt,
            public_b=public_b,
            public_a=public_a,
            relin=relin,
        )
        # Eager rotation keys for +/- every power-of-two step below slot count.
        two_n = 2 * ring.degree
        slots = ring.degree // 2
        t = 1
        while t < slots:
            for g in (pow(5, t, two_n), pow(5, -t, two_n)):
                if g not in keys.galois:
                    keys.galois[g] = self._galois_key_from_coeff(s_coeff, g, secret_ntt)
            t <<= 1
        return keys

    def _galois_key_from_coeff(
        self, s_coeff: np.ndarray, g: int, secret_ntt: np.ndarray
    ) -> KeySwitchKey:
        ring = self.ring
        index_map, flip = ring.automorphism_maps(g)
        rotated = np.zeros_like(s_coeff)
        sign = np.where(flip.astype(bool), -1, 1)
        rotated[index_map] = s_coeff * sign
        res = ring.residues_from_int(rotated, self.data_rows_full)
        ring.ntt(res, self.data_rows_full)
        return self._make_ksk(res, secret_ntt)

    # -- application ------------------------------------------------------------

    def galois_key(self, g: int) -> KeySwitchKey:
        key = self.keys.galois.get(g)
        if key is None:
            raise RotationKeyError(f"no rotation key for Galois element {g}")
        return key

    def key_switch(
        self,
        digits_coeff: np.ndarray,
        level: int,
        ksk: KeySwitchKey,
        digits_ntt: np.ndarray | None = None,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Switch ``digits_coeff`` (coefficient domain, data rows 0..level).

        Returns the (b, a) correction pair in coefficient domain over the
        data rows. ``digits_ntt`` may pass the already-transformed input to
        skip one forward NTT per digit.
        """
        ring = self.ring
        k = level + 1
        rows_ext = ring.ext_rows(level)
        n = ring.degree
        acc_b = np.zeros((k + 1, n), dtype=np.uint64)
        acc_a = np.zeros((k + 1, n), dtype=np.uint64)
        has_ntt = digits_ntt is not None
        nttmath.key_switch_accumulate(
            digits_coeff,
            digits_ntt if has_ntt else digits_coeff,
            has_ntt,
            ksk.b,
            ksk.a,
            rows_ext,
            ring.qs_all,
            ring.psis,
            ring.psis_shoup,
            acc_b,
            acc_a,
        )
        ring.intt(acc_b, rows_ext)
        ring.intt(acc_a, rows_ext)
        return ring.drop_last(acc_b, rows_ext), ring.drop_last(acc_a, rows_ext)
