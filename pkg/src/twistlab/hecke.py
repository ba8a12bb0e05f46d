"""Fourier coefficients of the weight-12 discriminant cusp form.

The integer coefficients tau(n) come from expanding q * prod (1 - q^n)^24
with exact arithmetic: the pentagonal-number series of prod (1 - q^n), then
its 24th power by repeated squaring of truncated polynomials.  Polynomial
products use Kronecker substitution on top of GMP integers, which keeps the
whole expansion exact and fast enough for limit ~ 1e5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from .arith import divisor_counts, primes_up_to
from .errors import CoverageError, EmptyTableError, FormNotAvailable, InvariantViolation

SUPPORTED_WEIGHTS = (12,)
SATAKE_TOL = 1e-12


@dataclass(frozen=True)
class EigenvalueTable:
    """raw[n] = a_f(n) and normalized[n] = a_f(n) / n^((weight-1)/2); index 0 unused."""

    weight: int
    limit: int
    raw: list[int] = field(repr=False)
    normalized: np.ndarray = field(repr=False)

    def lam(self, n: int) -> float:
        if n > self.limit:
            raise CoverageError(n, self.limit)
        return float(self.normalized[n])

    def raw_prime_power(self, p: int, r: int) -> int:
        """a_f(p^r), read from the table or extended exactly by the Hecke recursion."""
        if r == 0:
            return 1
        if p ** r <= self.limit:
            return self.raw[p ** r]
        if p > self.limit:
            raise CoverageError(p, self.limit)
        pk = p ** (self.weight - 1)
        prev, cur = 1, self.raw[p]
        for _ in range(1, r):
            prev, cur = cur, self.raw[p] * cur - pk * prev
        return cur

    def lam_prime_power(self, p: int, r: int) -> float:
        """lambda_f(p^r); valid for any r once p itself is covered."""
        if r == 0:
            return 1.0
        if p ** r <= self.limit:
            return float(self.normalized[p ** r])
        return _normalize_one(self.raw_prime_power(p, r), p ** r, self.weight)


@dataclass(frozen=True)
class SatakePair:
    p: int
    alpha: complex
    beta: complex


@dataclass(frozen=True)
class HeckeViolation:
    kind: str  # "multiplicativity" or "recursion"
    m: int
    n: int
    discrepancy: int


@dataclass(frozen=True)
class DeligneViolation:
    n: int
    value: float
    bound: int


# -- exact polynomial arithmetic ------------------------------------------------


def _slot_bytes(bound: int) -> int:
    # signed slots must hold |c| <= bound
    return (bound.bit_length() + 2 + 7) // 8


def _pack(coeffs: list[int], width: int) -> int:
    bias = 1 << (8 * width - 1)
    blob = b"".join((c + bias).to_bytes(width, "little") for c in coeffs)
    bias_all = int.from_bytes(bias.to_bytes(width, "little") * len(coeffs), "little")
    return int.from_bytes(blob, "little") - bias_all


def _unpack(value, count: int, width: int) -> list[int]:
    bits = 8 * width * count
    bias = 1 << (8 * width - 1)
    bias_all = int.from_bytes(bias.to_bytes(width, "little") * count, "little")
    low = int(gmpy2.f_mod_2exp(gmpy2.mpz(value), bits))
    shifted = (low + bias_all) & ((1 << bits) - 1)
    blob = shifted.to_bytes(width * count, "little")
    return [
        int.from_bytes(blob[i * width : (i + 1) * width], "little") - bias
        for i in range(count)
    ]


def poly_mul_trunc(a: list[int], b: list[int], length: int) -> list[int]:
    """Exact product of integer polynomials, truncated to `length` coefficients."""
    a = a[:length]
    b = b[:length]
    if not a or not b:
        return [0] * length
    ma, mb = max(map(abs, a)), max(map(abs, b))
    # slots hold the inputs as well as every product coefficient
    bound = max(min(len(a), len(b)) * ma * mb, ma, mb, 1)
    width = _slot_bytes(bound)
    pa = gmpy2.mpz(_pack(a, width))
    pb = pa if b is a else gmpy2.mpz(_pack(b, width))
    return _unpack(pa * pb, length, width)


def pentagonal_series(length: int) -> list[int]:
    """Coefficients of prod_{n>=1} (1 - q^n) mod q^length (Euler's pentagonal theorem)."""
    out = [0] * length
    k = 0
    while True:
        sign = -1 if k % 2 else 1
        hit = False
        for j in ((k * (3 * k - 1)) // 2, (k * (3 * k + 1)) // 2) if k else (0,):
            if j < length:
                out[j] += sign
                hit = True
        if not hit:
            break
        k += 1
    return out


def delta_coefficients(limit: int) -> list[int]:
    """tau(1..limit) with a leading 0 placeholder at index 0."""
    length = limit  # tau(n) is the q^(n-1) coefficient of prod (1-q^n)^24
    p1 = pentagonal_series(length)
    p2 = poly_mul_trunc(p1, p1, length)
    p4 = poly_mul_trunc(p2, p2, length)
    p8 = poly_mul_trunc(p4, p4, length)
    p16 = poly_mul_trunc(p8, p8, length)
    p24 = poly_mul_trunc(p16, p8, length)
    return [0] + p24


# -- public operations ---------------------------------------------------------


def _normalize_one(a: int, n: int, weight: int) -> float:
    half = (weight - 2) // 2  # n^((w-1)/2) = n^half * sqrt(n)
    return (a / n ** half) / math.sqrt(n)


def normalize(table: EigenvalueTable) -> EigenvalueTable:
    norm = np.zeros(table.limit + 1, dtype=np.float64)
    for n in range(1, table.limit + 1):
        norm[n] = _normalize_one(table.raw[n], n, table.weight)
    if table.limit >= 1:
        norm[1] = table.raw[1]
    return EigenvalueTable(table.weight, table.limit, table.raw, norm)


def build_integer_coefficients(weight: int = 12, limit: int = 1000) -> EigenvalueTable:
    """Exact a_f(n) for 1 <= n <= limit, plus normalized values."""
    if weight not in SUPPORTED_WEIGHTS:
        raise FormNotAvailable(f"form not available: no eigenform wired up for weight {weight}")
    if limit < 1:
        raise EmptyTableError("limit must be >= 1")
    raw = delta_coefficients(limit)
    return normalize(EigenvalueTable(weight, limit, raw, np.zeros(0)))


def satake(table: EigenvalueTable, p: int) -> SatakePair:
    """Roots of x^2 - lambda_f(p) x + 1."""
    lam = table.lam(p)
    if abs(lam) > 2:
        raise InvariantViolation(f"|lambda_f({p})| = {abs(lam)!r} > 2 contradicts Deligne")
    if abs(lam) == 2:
        alpha = beta = complex(lam / 2)
    else:
        im = math.sqrt(1.0 - lam * lam / 4.0)
        alpha = complex(lam / 2, im)
        beta = complex(lam / 2, -im)
    for root in (alpha, beta):
        if abs(abs(root) - 1.0) > SATAKE_TOL:
            raise InvariantViolation(f"Satake root {root!r} at p={p} off the unit circle")
    if abs(alpha * beta - 1) > SATAKE_TOL or abs(alpha + beta - lam) > SATAKE_TOL:
        raise InvariantViolation(f"Satake pair at p={p} fails alpha*beta = 1")
    return SatakePair(p, alpha, beta)


def verify_hecke(table: EigenvalueTable) -> list[HeckeViolation]:
    """Exact check of a(mn) = a(m)a(n) for coprime m < n and of the prime-power recursion."""
    raw = table.raw
    N = table.limit
    bad: list[HeckeViolation] = []
    for m in range(2, math.isqrt(N) + 1):
        am = raw[m]
        for n in range(m + 1, N // m + 1):
            if math.gcd(m, n) == 1:
                diff = raw[m * n] - am * raw[n]
                if diff:
                    bad.append(HeckeViolation("multiplicativity", m, n, diff))
    for p in primes_up_to(N):
        if p * p > N:
            break
        pk = p ** (table.weight - 1)
        r, q = 1, p
        while q * p <= N:
            diff = raw[p] * raw[q] - raw[q * p] - pk * raw[q // p]
            if diff:
                bad.append(HeckeViolation("recursion", p, r, diff))
            r += 1
            q *= p
    return bad


def verify_deligne(table: EigenvalueTable) -> list[DeligneViolation]:
    """|lambda_f(n)| <= d(n) against an independently sieved divisor-count table."""
    d = divisor_counts(table.limit)
    lam = np.abs(table.normalized[1 : table.limit + 1])
    idx = np.flatnonzero(lam > d[1:]) + 1
    return [DeligneViolation(int(n), float(table.normalized[n]), int(d[n])) for n in idx]
