"""Deterministic RNS modulus chain generation.

Primes are the smallest primes congruent to 1 mod 2p above 2^(bits-1),
scanning upward, so the chain (and therefore every scale transition) is
identical across platforms and runs. The last listed prime is the
key-switching prime and never holds data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..params import CkksParams

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)  # deterministic < 3.3e24


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def generate_prime(bits: int, two_n: int, skip: set[int]) -> int:
    """Smallest prime == 1 (mod two_n) above 2^(bits-1), not in ``skip``."""
    c = ((1 << (bits - 1)) // two_n + 1) * two_n + 1
    while True:
        if c not in skip and is_prime(c):
            return c
        c += two_n


def primitive_2n_root(q: int, two_n: int) -> int:
    """Deterministic primitive 2n-th root of unity mod q."""
    n = two_n // 2
    exp = (q - 1) // two_n
    for x in range(2, q):
        psi = pow(x, exp, q)
        if pow(psi, n, q) == q - 1:
            return psi
    raise ParameterError(f"no primitive {two_n}-th root mod {q}")


def _bitrev(x: int, bits: int) -> int:
    y = 0
    for _ in range(bits):
        y = (y << 1) | (x & 1)
        x >>= 1
    return y


def shoup(values: np.ndarray, q: int) -> np.ndarray:
    """Precomputed Shoup companions floor(w * 2^64 / q)."""
    return ((values.astype(object) << 64) // q).astype(np.uint64)


@dataclass(frozen=True)
class PrimeContext:
    """One NTT-ready prime: twiddle tables in bit-reversed psi-power order.

    Inverse twiddles carry an extra factor of 1/2 so the inverse transform
    folds its 1/n normalization into the butterfly stages.
    """

    q: int
    psis: np.ndarray
    psis_shoup: np.ndarray
    ipsis_half: np.ndarray
    ipsis_half_shoup: np.ndarray


def build_prime_context(q: int, n: int) -> PrimeContext:
    logn = n.bit_length() - 1
    psi = primitive_2n_root(q, 2 * n)
    ipsi = pow(psi, -1, q)
    inv2 = pow(2, -1, q)
    psis = np.zeros(n, dtype=np.uint64)
    ipsis_half = np.zeros(n, dtype=np.uint64)
    for i in range(n):
        r = _bitrev(i, logn)
        psis[i] = pow(psi, r, q)
        ipsis_half[i] = pow(ipsi, r, q) * inv2 % q
    return PrimeContext(
        q=q,
        psis=psis,
        psis_shoup=shoup(psis, q),
        ipsis_half=ipsis_half,
        ipsis_half_shoup=shoup(ipsis_half, q),
    )


class ModulusChain:
    """The ordered prime chain for a parameter set.

    ``primes[:-1]`` are data primes (bottom-up); ``primes[-1]`` is the
    key-switching special prime. The special prime must be the largest of
    the chain: key-switch digits are bounded by the data primes and divided
    by the special prime, so any smaller choice amplifies switch noise by
    the bit-size gap. Level equals remaining rescales; a fresh ciphertext
    at level ``max_level`` spans ``max_level + 1`` data primes.
    """

    def __init__(self, params: CkksParams):
        self.params = params
        n = params.poly_modulus_degree
        two_n = 2 * n
        chosen: set[int] = set()
        generated: list[int] = []
        for bits in params.coeff_modulus_bits:
            q = generate_prime(bits, two_n, chosen)
            chosen.add(q)
            generated.append(q)
        # Largest prime serves as the key-switch prime (last occurrence on
        # ties, so a uniform bit vector keeps the last listed prime special).
        special_pos = max(range(len(generated)), key=lambda i: (generated[i], i))
        special = generated.pop(special_pos)
        self.primes: tuple[int, ...] = tuple(generated) + (special,)
        self.special_index = len(self.primes) - 1
        self.data_primes: tuple[int, ...] = tuple(generated)
        self.special_prime = special

    def active_data_primes(self, level: int) -> tuple[int, ...]:
        return self.data_primes[: level + 1]

    def rescale_divisor(self, level: int) -> int:
        """Prime dropped when rescaling from ``level``."""
        return self.data_primes[level]
