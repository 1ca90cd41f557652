"""Scheme parameters shared by every engine."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError

# Default parameter set: degree 8192, moduli {50,40,40,40,40} bits, scale 2^40.
DEFAULT_POLY_DEGREE = 8192
DEFAULT_COEFF_BITS = (50, 40, 40, 40, 40)
DEFAULT_SCALE = 2.0**40

# The fast modular kernels rely on q < 2^51 (float-assisted Barrett).
MAX_PRIME_BITS = 51


@dataclass(frozen=True)
class CkksParams:
    """Parameters of the leveled scheme.

    ``coeff_modulus_bits`` lists the prime bit sizes bottom-up; the last
    prime is reserved for key switching and never holds data, so the number
    of available rescales is ``len(coeff_modulus_bits) - 2``.
    """

    poly_modulus_degree: int = DEFAULT_POLY_DEGREE
    coeff_modulus_bits: tuple[int, ...] = DEFAULT_COEFF_BITS
    initial_scale: float = DEFAULT_SCALE

    def __post_init__(self) -> None:
        p = self.poly_modulus_degree
        if p <= 0 or p & (p - 1) != 0:
            raise ParameterError(f"poly_modulus_degree must be a power of two, got {p}")
        n = p.bit_length() - 1
        if not 10 <= n <= 15:
            raise ParameterError(
                f"poly_modulus_degree must be 2^n with 10 <= n <= 15, got 2^{n}"
            )
        bits = tuple(self.coeff_modulus_bits)
        object.__setattr__(self, "coeff_modulus_bits", bits)
        if len(bits) < 3:
            raise ParameterError("coefficient modulus needs at least 3 primes")
        for b in bits:
            if not 20 <= b <= MAX_PRIME_BITS:
                raise ParameterError(f"prime bit size {b} outside [20, {MAX_PRIME_BITS}]")
        if self.initial_scale <= 0:
            raise ParameterError("initial_scale must be positive")

    @property
    def slot_count(self) -> int:
        return self.poly_modulus_degree // 2

    @property
    def max_level(self) -> int:
        """Number of rescales a fresh ciphertext can absorb."""
        return len(self.coeff_modulus_bits) - 2


DEFAULT_PARAMS = CkksParams()
