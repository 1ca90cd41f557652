"""Exact modular arithmetic kernels (numba, nogil).

All kernels operate on uint64 residue matrices of shape (rows, degree), one
row per RNS prime. Primes must stay below 2^51 so the float-assisted Barrett
reduction in ``_mulmod`` is exact; NTT butterflies use Shoup multiplication
with lazy (Harvey-style) reduction. Every kernel releases the GIL so the
executor's threads overlap on real cores.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT, inline="always")
def _mulhi64(a, b):
    a_lo = a & uint64(0xFFFFFFFF)
    a_hi = a >> uint64(32)
    b_lo = b & uint64(0xFFFFFFFF)
    b_hi = b >> uint64(32)
    lo_lo = a_lo * b_lo
    hi_lo = a_hi * b_lo
    cross = (lo_lo >> uint64(32)) + (hi_lo & uint64(0xFFFFFFFF)) + a_lo * b_hi
    return (hi_lo >> uint64(32)) + (cross >> uint64(32)) + a_hi * b_hi


@njit(**_JIT, inline="always")
def _mulmod_shoup(x, w, w_shoup, q):
    r = x * w - _mulhi64(x, w_shoup) * q
    return r - q if r >= q else r


@njit(**_JIT, inline="always")
def _mulmod(a, b, q):
    """Exact a*b mod q for q < 2^51 via float-assisted quotient estimate."""
    c = uint64(np.float64(a) * np.float64(b) / np.float64(q))
    r = a * b - c * q
    while r >= uint64(0x8000000000000000):
        r += q
    while r >= q:
        r -= q
    return r


@njit(**_JIT, inline="always")
def _addmod(a, b, q):
    s = a + b
    return s - q if s >= q else s


@njit(**_JIT, inline="always")
def _submod(a, b, q):
    return a - b if a >= b else a + q - b


@njit(**_JIT, inline="always")
def _reduce(x, q):
    """x mod q for arbitrary x < 2^52."""
    c = uint64(np.float64(x) / np.float64(q))
    r = x - c * q
    while r >= uint64(0x8000000000000000):
        r += q
    while r >= q:
        r -= q
    return r


@njit(**_JIT)
def _ntt_row(a, ps, sh, q):
    """One-row negacyclic NTT in place; Harvey lazy reduction (< 4q inside)."""
    n = a.shape[0]
    q2 = q << uint64(1)
    t = n
    m = 1
    while m < n:
        t >>= 1
        for i in range(m):
            j1 = 2 * i * t
            s = ps[m + i]
            s_sh = sh[m + i]
            for j in range(j1, j1 + t):
                u = a[j]
                if u >= q2:
                    u -= q2
                v = a[j + t] * s - _mulhi64(a[j + t], s_sh) * q
                a[j] = u + v
                a[j + t] = u + q2 - v
        m <<= 1
    for j in range(n):
        x = a[j]
        if x >= q2:
            x -= q2
        if x >= q:
            x -= q
        a[j] = x


@njit(**_JIT)
def _intt_row(a, ps_half, sh_half, q):
    """One-row inverse negacyclic NTT in place, lazy reduction.

    The 1/n normalization is folded in: twiddles carry an extra factor of
    1/2 and the plain butterfly branch halves via the parity trick, so each
    of the log2(n) stages contributes one factor of 1/2.
    """
    n = a.shape[0]
    q2 = q << uint64(1)
    hq = (q + uint64(1)) >> uint64(1)
    t = 1
    m = n
    while m > 1:
        j1 = 0
        h = m >> 1
        for i in range(h):
            s = ps_half[h + i]
            s_sh = sh_half[h + i]
            for j in range(j1, j1 + t):
                u = a[j]
                v = a[j + t]
                x = u + v
                if x >= q2:
                    x -= q2
                a[j] = (x >> uint64(1)) + (x & uint64(1)) * hq
                d = u + q2 - v
                a[j + t] = d * s - _mulhi64(d, s_sh) * q
            j1 += 2 * t
        t <<= 1
        m = h
    for j in range(n):
        x = a[j]
        if x >= q:
            x -= q
        a[j] = x


@njit(**_JIT)
def ntt_forward(res, psis, psis_shoup, qs, rows):
    for r in range(res.shape[0]):
        tab = rows[r]
        _ntt_row(res[r], psis[tab], psis_shoup[tab], qs[tab])


@njit(**_JIT)
def ntt_inverse(res, ipsis_half, ipsis_half_shoup, qs, rows):
    for r in range(res.shape[0]):
        tab = rows[r]
        _intt_row(res[r], ipsis_half[tab], ipsis_half_shoup[tab], qs[tab])


@njit(**_JIT)
def key_switch_accumulate(
    dig_coeff,
    dig_ntt,
    has_ntt,
    ksk_b,
    ksk_a,
    rows_ext,
    qs_all,
    psis,
    psis_shoup,
    acc_b,
    acc_a,
):
    """Fused hybrid key switch inner loop.

    For every RNS digit: extend its residues to each extended-basis row,
    transform, and multiply-accumulate against both key components. One
    kernel call per switch keeps the GIL released through the hot path.
    """
    k, n = dig_coeff.shape
    kk = rows_ext.shape[0]
    scratch = np.empty(n, dtype=np.uint64)
    for i in range(k):
        q_src = qs_all[i]
        for jj in range(kk):
            row = rows_ext[jj]
            q = qs_all[row]
            if has_ntt and row == i:
                work = dig_ntt[i]
            else:
                if q_src <= q:
                    for t in range(n):
                        scratch[t] = dig_coeff[i, t]
                else:
                    for t in range(n):
                        scratch[t] = _reduce(dig_coeff[i, t], q)
                _ntt_row(scratch, psis[row], psis_shoup[row], q)
                work = scratch
            kb = ksk_b[i, row]
            ka = ksk_a[i, row]
            for t in range(n):
                acc_b[jj, t] = _addmod(acc_b[jj, t], _mulmod(work[t], kb[t], q), q)
                acc_a[jj, t] = _addmod(acc_a[jj, t], _mulmod(work[t], ka[t], q), q)


@njit(**_JIT)
def ct_multiply(a0, a1, b0, b1, d0, d1, d2, qs):
    """Fused 2x2 component ciphertext multiply (NTT domain)."""
    k, n = a0.shape
    for r in range(k):
        q = qs[r]
        for t in range(n):
            x0 = a0[r, t]
            x1 = a1[r, t]
            y0 = b0[r, t]
            y1 = b1[r, t]
            d0[r, t] = _mulmod(x0, y0, q)
            d1[r, t] = _addmod(_mulmod(x0, y1, q), _mulmod(x1, y0, q), q)
            d2[r, t] = _mulmod(x1, y1, q)


@njit(**_JIT)
def poly_add(out, a, b, qs):
    k, n = out.shape
    for r in range(k):
        q = qs[r]
        for j in range(n):
            out[r, j] = _addmod(a[r, j], b[r, j], q)


@njit(**_JIT)
def poly_sub(out, a, b, qs):
    k, n = out.shape
    for r in range(k):
        q = qs[r]
        for j in range(n):
            out[r, j] = _submod(a[r, j], b[r, j], q)


@njit(**_JIT)
def poly_neg(out, a, qs):
    k, n = out.shape
    for r in range(k):
        q = qs[r]
        for j in range(n):
            out[r, j] = uint64(0) if a[r, j] == uint64(0) else q - a[r, j]


@njit(**_JIT)
def poly_mul(out, a, b, qs):
    k, n = out.shape
    for r in range(k):
        q = qs[r]
        for j in range(n):
            out[r, j] = _mulmod(a[r, j], b[r, j], q)


@njit(**_JIT)
def poly_mul_acc(acc, a, b, qs):
    k, n = acc.shape
    for r in range(k):
        q = qs[r]
        for j in range(n):
            acc[r, j] = _addmod(acc[r, j], _mulmod(a[r, j], b[r, j], q), q)


@njit(**_JIT)
def poly_mul_acc_sel(acc, a, b_full, rows, qs_all):
    """acc[r] += a[r] * b_full[rows[r]] mod qs_all[rows[r]] (no key copies)."""
    k, n = acc.shape
    for r in range(k):
        q = qs_all[rows[r]]
        br = b_full[rows[r]]
        ar = a[r]
        for j in range(n):
            acc[r, j] = _addmod(acc[r, j], _mulmod(ar[j], br[j], q), q)


@njit(**_JIT)
def poly_scalar_mul(out, a, scalars, qs):
    """Per-row scalar multiply: out[r] = a[r] * scalars[r] mod qs[r]."""
    k, n = out.shape
    for r in range(k):
        q = qs[r]
        s = scalars[r]
        for j in range(n):
            out[r, j] = _mulmod(a[r, j], s, q)


@njit(**_JIT)
def row_extend(out, digit, q):
    """Reduce one digit row (values below some other prime < 2^51) mod q."""
    n = digit.shape[0]
    for j in range(n):
        out[j] = _reduce(digit[j], q)


@njit(**_JIT)
def drop_last_prime(res, qs, last_mod_qj, inv_last, half_last, out):
    """Exact rounded division by the last prime row, in coefficient domain.

    out[j] = (res[j] - centered_rem) / q_last mod q_j for each kept row j,
    where centered_rem is res[last] lifted to [-q_last/2, q_last/2).
    """
    k, n = res.shape
    keep = k - 1
    for j in range(keep):
        q = qs[j]
        lm = last_mod_qj[j]
        inv = inv_last[j]
        for t in range(n):
            rem = res[keep, t]
            c = _reduce(rem, q)
            if rem > half_last:
                c = _submod(c, lm, q)
            y = _submod(res[j, t], c, q)
            out[j, t] = _mulmod(y, inv, q)


@njit(**_JIT)
def garner_centered_float(res, qs, pp, inv_pp, q_floats, w_floats, out):
    """Mixed-radix (Garner) reconstruction to centered float64 values.

    ``pp[m, i]`` is prod(q_0..q_{m-1}) mod q_i, ``inv_pp[i]`` its inverse at
    m == i, ``w_floats[m]`` the float value of prod(q_0..q_{m-1}). Digits are
    re-centered greedily; for any ciphertext that decrypts to a value far
    below the modulus, all high digits vanish and the float result is exact.
    """
    k, n = res.shape
    digits = np.empty(k, dtype=np.uint64)
    for t in range(n):
        digits[0] = res[0, t]
        for i in range(1, k):
            qi = qs[i]
            s = _reduce(digits[0], qi)
            for m in range(1, i):
                s = _addmod(s, _mulmod(digits[m], pp[m, i], qi), qi)
            digits[i] = _mulmod(_submod(res[i, t], s, qi), inv_pp[i], qi)
        val = 0.0
        carry = uint64(0)
        for m in range(k):
            d = digits[m] + carry
            qm = qs[m]
            if d > (qm >> uint64(1)):
                val += (np.float64(d) - q_floats[m]) * w_floats[m]
                carry = uint64(1)
            else:
                val += np.float64(d) * w_floats[m]
                carry = uint64(0)
        out[t] = val


@njit(**_JIT)
def automorphism(out, a, index_map, flip, qs):
    """Apply a Galois map in coefficient domain: out[index_map[j]] = +/-a[j]."""
    k, n = a.shape
    for r in range(k):
        q = qs[r]
        for j in range(n):
            x = a[r, j]
            if flip[j] and x != uint64(0):
                x = q - x
            out[r, index_map[j]] = x
