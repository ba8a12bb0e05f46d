"""Twisted sums H_d(Y), the moments T_m / S_m, growth scans and the Hoelder check.

Layout of the hot loop: for a fixed Y the coefficient vector
c(n) = lambda_f(n) Phi(n/Y) is built once.  Discriminants are processed in
fixed chunks of CHUNK; inside a chunk the characters chi_d(n) for all
n <= nmax come from complete multiplicativity over a smallest-prime-factor
table, so each column costs one int8 product.  Per-chunk totals use
math.fsum and chunks are merged in index order, which makes the result
independent of the thread count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .arith import smallest_prime_factor
from .characters import FundamentalDiscriminantSet, character_matrix, kronecker, sieve_fundamental
from .errors import CoverageError, InvariantViolation
from .hecke import EigenvalueTable
from .weights import SmoothWeight

CHUNK = 1 << 14
_BLOCK_CELLS = 1 << 22  # rows * columns per float64 matvec block
KINDS = ("T", "S", "T-sharp")
HOLDER_RTOL = 1e-9


@dataclass(frozen=True)
class TwistedSumValue:
    d: int
    Y: float
    value: float
    terms_used: int


@dataclass(frozen=True)
class MomentReport:
    kind: str
    family: str
    X: float
    Y: float
    m: float
    moment: float
    discriminant_count: int
    predicted: float
    ratio: float
    terms_used: int
    seconds: float = 0.0


@dataclass(frozen=True)
class HolderTriple:
    H1: float
    H2: float
    Tm: float
    m: int
    epsilon: float
    slack: float  # H2^(m-1) Tm - H1^m
    relative_slack: float


# -- coefficient vectors ----------------------------------------------------------


def support_range(Y: float, w: SmoothWeight) -> tuple[int, int]:
    """Integers n with a Y < n < b Y (the open support of Phi(n/Y)); may be empty."""
    lo = math.floor(w.a * Y) + 1
    hi = math.ceil(w.b * Y) - 1
    return lo, hi


def coefficients(
    kind: str, Y: float, eigen: EigenvalueTable | None, w: SmoothWeight | None
) -> tuple[int, np.ndarray]:
    """(n0, c) with c[i] the weight attached to n = n0 + i."""
    if kind == "T-sharp":
        lo, hi = 1, math.floor(Y)
    else:
        lo, hi = support_range(Y, w)
    if hi < lo:
        return lo, np.zeros(0)
    n = np.arange(lo, hi + 1)
    if kind == "S":
        return lo, w(n / Y)
    if eigen is None:
        raise ValueError(f"kind {kind!r} needs an eigenvalue table")
    if hi > eigen.limit:
        raise CoverageError(hi, eigen.limit)
    lam = eigen.normalized[lo : hi + 1]
    if kind == "T-sharp":
        return lo, lam.copy()
    return lo, lam * w(n / Y)


def twisted_sum(d: int, Y: float, eigen: EigenvalueTable, w: SmoothWeight) -> TwistedSumValue:
    """H_d(Y) = sum_n chi_d(n) lambda_f(n) Phi(n/Y); d is the character's discriminant."""
    n0, c = coefficients("T", Y, eigen, w)
    vals = [kronecker(d, n0 + i) * c[i] for i in range(len(c))]
    return TwistedSumValue(d, Y, math.fsum(vals), len(c))


def _chunk_sums(tops: np.ndarray, n0: int, c: np.ndarray, spf: np.ndarray) -> np.ndarray:
    if len(c) == 0:
        return np.zeros(len(tops))
    nmax = n0 + len(c) - 1
    M = character_matrix(tops, nmax, spf)[:, n0:]
    out = np.empty(len(tops))
    rows = max(1, _BLOCK_CELLS // len(c))
    for i in range(0, len(tops), rows):
        out[i : i + rows] = M[i : i + rows].astype(np.float64) @ c
    return out


def twisted_sums(
    tops: np.ndarray,
    n0: int,
    c: np.ndarray,
    threads: int = 1,
    spf: np.ndarray | None = None,
) -> np.ndarray:
    """Vector of sum_i chi_D(n0+i) c[i] over every D in tops."""
    nmax = n0 + len(c) - 1
    if spf is None or len(spf) <= nmax:
        spf = smallest_prime_factor(max(nmax, 2))
    starts = range(0, len(tops), CHUNK)
    work = lambda s: _chunk_sums(tops[s : s + CHUNK], n0, c, spf)  # noqa: E731
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    return np.concatenate(parts) if parts else np.zeros(0)


def reduce_power(values: np.ndarray, m: float) -> float:
    """sum |v|^m with per-chunk fsum and an ordered merge of chunk totals."""
    partial = [math.fsum(np.abs(values[s : s + CHUNK]) ** m) for s in range(0, len(values), CHUNK)]
    return math.fsum(partial)


def reduce_products(a: np.ndarray, b: np.ndarray) -> float:
    partial = [math.fsum(a[s : s + CHUNK] * b[s : s + CHUNK]) for s in range(0, len(a), CHUNK)]
    return math.fsum(partial)


# -- moments -----------------------------------------------------------------------


def envelope_exponent(kind: str, m: float) -> float:
    """Power of log X in the reference growth envelope for each moment kind."""
    if kind == "T":
        return m * (m - 3) / 2
    if kind == "T-sharp":
        return (m - 2) * (m - 1) / 2 + 1
    if kind == "S":
        return m * (m - 1) / 2
    raise ValueError(f"unknown moment kind {kind!r}")


def predicted_envelope(kind: str, X: float, Y: float, m: float) -> float:
    return X * Y ** (m / 2) * math.log(X) ** envelope_exponent(kind, m)


def _discs_for(X: float, family: str, discs: FundamentalDiscriminantSet | None):
    if discs is None or discs.family != family or discs.bound < X:
        return sieve_fundamental(X, family)
    return discs.upto(X) if discs.bound > X else discs


def moment(
    kind: str,
    X: float,
    Y: float,
    m: float,
    eigen: EigenvalueTable | None = None,
    w: SmoothWeight | None = None,
    family: str = "fundamental",
    discs: FundamentalDiscriminantSet | None = None,
    threads: int = 1,
) -> MomentReport:
    if kind not in KINDS:
        raise ValueError(f"unknown moment kind {kind!r}")
    if m < 0:
        raise ValueError("m must be non-negative")
    if X < 1 or Y <= 0:
        raise ValueError("need X >= 1 and Y > 0")
    t0 = time.perf_counter()
    discs = _discs_for(X, family, discs)
    n0, c = coefficients(kind, Y, eigen, w)
    H = twisted_sums(discs.tops, n0, c, threads)
    total = reduce_power(H, m)
    pred = predicted_envelope(kind, X, Y, m) if X > 1 else float("nan")
    ratio = total / pred if pred and math.isfinite(pred) else float("nan")
    return MomentReport(
        kind, family, X, Y, m, total, discs.count, pred, ratio, len(c), time.perf_counter() - t0
    )


def moment_T(X, Y, m, eigen, w, family="fundamental", discs=None, threads=1) -> MomentReport:
    """Smoothed moment sum_d |sum_n chi_d(n) lambda_f(n) Phi(n/Y)|^m."""
    return moment("T", X, Y, m, eigen, w, family, discs, threads)


def moment_S(X, Y, m, w, family="fundamental", discs=None, threads=1) -> MomentReport:
    """Smoothed character-sum moment sum_d |sum_n chi_d(n) Phi(n/Y)|^m."""
    return moment("S", X, Y, m, None, w, family, discs, threads)


def moment_T_sharp(X, Y, m, eigen, family="fundamental", discs=None, threads=1) -> MomentReport:
    """Sharp-cutoff moment sum_d |sum_{n <= Y} chi_d(n) lambda_f(n)|^m."""
    return moment("T-sharp", X, Y, m, eigen, None, family, discs, threads)


def power_rule(alpha: float) -> Callable[[float], float]:
    return lambda X: X ** alpha


def scaling_scan(
    m: float,
    X_grid: Sequence[float],
    Y_rule: Callable[[float], float] | float,
    eigen: EigenvalueTable | None,
    w: SmoothWeight | None,
    kind: str = "T",
    family: str = "fundamental",
    threads: int = 1,
) -> list[MomentReport]:
    """One MomentReport per X; a float Y_rule is read as the exponent in Y = X^alpha."""
    rule = power_rule(Y_rule) if isinstance(Y_rule, (int, float)) else Y_rule
    if not X_grid:
        return []
    discs = sieve_fundamental(max(X_grid), family)
    return [moment(kind, X, rule(X), m, eigen, w, family, discs, threads) for X in X_grid]


# -- Hoelder --------------------------------------------------------------------------


def holder_check(
    X: float,
    Y: float,
    m: int,
    epsilon: float,
    eigen: EigenvalueTable,
    w: SmoothWeight,
    family: str = "fundamental",
    discs: FundamentalDiscriminantSet | None = None,
    threads: int = 1,
) -> HolderTriple:
    """Compute H1, H2, T_m and assert H1^m <= H2^(m-1) T_m."""
    if m < 4 or m % 2 or int(m) != m:
        raise ValueError("holder_check needs an even integer m >= 4")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    m = int(m)
    discs = _discs_for(X, family, discs)
    n0, c = coefficients("T", Y, eigen, w)
    e0, ce = coefficients("T", Y ** epsilon, eigen, w)
    H_big = twisted_sums(discs.tops, n0, c, threads)
    H_small = twisted_sums(discs.tops, e0, ce, threads)
    H1 = reduce_products(H_big, H_small ** (m - 1))
    H2 = reduce_power(H_small, m)
    Tm = reduce_power(H_big, m)
    lhs = H1 ** m
    rhs = H2 ** (m - 1) * Tm
    slack = rhs - lhs
    if lhs == 0:
        ok, rel = True, (1.0 if rhs > 0 else 0.0)
    elif rhs == 0:
        ok, rel = False, -math.inf
    else:
        log_gap = (m - 1) * math.log(H2) + math.log(Tm) - m * math.log(abs(H1))
        rel = -math.expm1(-log_gap)  # (rhs - lhs) / rhs
        ok = log_gap >= math.log1p(-HOLDER_RTOL)
    if not ok:
        raise InvariantViolation(
            f"Hoelder inequality violated: H1^m={lhs!r} > H2^(m-1) T_m={rhs!r}"
        )
    return HolderTriple(H1, H2, Tm, m, epsilon, slack, rel)
