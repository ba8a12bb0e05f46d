"""Square-product sums: the functions g, g+, their local Euler factors, and P_f.

g(n_1..n_m) = prod lambda_f(n_i) * prod_{p | n_1...n_m} (1 + 1/p)^-1 when the
product n_1...n_m is a perfect square, and 0 otherwise; g+ uses |lambda_f|.

The local factor of G at p is a truncated series in x_j = p^(-s_j).  The
E factor is obtained by dividing it by the named L-factors, where each
L-factor series is the inverse of its Euler polynomial.  verify_factorization
rebuilds G from E and L-factor series expanded on a different route (Dirichlet
coefficients of zeta and of L(s, sym^2 f) at prime powers), so agreement
checks the factorization, not just the series division.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .arith import factorize, kernel_table, primes_up_to, smallest_prime_factor
from .errors import CoverageError, EnumerationBudgetExceeded
from .hecke import EigenvalueTable
from .moments import support_range
from .series import TruncatedSeries, exponents_upto
from .weights import SmoothWeight


@dataclass(frozen=True)
class MultiIndex:
    entries: tuple[int, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("multi-index needs arity >= 1")
        if any(n < 1 for n in self.entries):
            raise ValueError("multi-index entries must be >= 1")

    @property
    def m(self) -> int:
        return len(self.entries)


def radical_weight(primes) -> float:
    """prod_{p} p/(p+1) over distinct primes, rounded once from the exact rational."""
    num = den = 1
    for p in primes:
        num *= p
        den *= p + 1
    return float(Fraction(num, den))


def g_value(idx: MultiIndex | Sequence[int], eigen: EigenvalueTable, plus: bool = False) -> float:
    entries = idx.entries if isinstance(idx, MultiIndex) else tuple(idx)
    for n in entries:
        if n > eigen.limit:
            raise CoverageError(n, eigen.limit)
    exps: dict[int, int] = {}
    for n in entries:
        for p, e in factorize(n).items():
            exps[p] = exps.get(p, 0) + e
    if any(e % 2 for e in exps.values()):
        return 0.0
    lam = 1.0
    for n in entries:
        v = eigen.lam(n)
        lam *= abs(v) if plus else v
    return lam * radical_weight(sorted(exps))


# -- symmetric square --------------------------------------------------------------


@dataclass(frozen=True)
class SymSquareCoefficients:
    limit: int
    values: np.ndarray = field(repr=False)  # values[n] = b(n), index 0 unused


def sym_square_coefficients(eigen: EigenvalueTable, N: int) -> SymSquareCoefficients:
    """b(n) with L(s, sym^2 f) = zeta(2s) sum lambda_f(n^2) n^-s = sum b(n) n^-s."""
    if N * N > eigen.limit:
        raise CoverageError(N * N, eigen.limit)
    b = np.zeros(N + 1)
    for k in range(1, math.isqrt(N) + 1):
        k2 = k * k
        for j in range(1, N // k2 + 1):
            b[k2 * j] += eigen.normalized[j * j]
    return SymSquareCoefficients(N, b)


def sym_square_prime_power(eigen: EigenvalueTable, p: int, k: int) -> float:
    """b(p^k) = sum_{0 <= j <= k/2} lambda_f(p^(2(k-2j)))."""
    return math.fsum(eigen.lam_prime_power(p, 2 * (k - 2 * j)) for j in range(k // 2 + 1))


def sym_square_euler_poly(eigen: EigenvalueTable, p: int) -> list[float]:
    """Coefficients of 1 - lambda(p^2) y + lambda(p^2) y^2 - y^3."""
    l2 = eigen.lam_prime_power(p, 2)
    return [1.0, -l2, l2, -1.0]


# -- local Euler factors -------------------------------------------------------------


def _unit(m: int, *idx: int) -> tuple[int, ...]:
    v = [0] * m
    for i in idx:
        v[i] += 1
    return tuple(v)


def local_factor_G(
    p: int, m: int, D: int, eigen: EigenvalueTable, plus: bool = False
) -> TruncatedSeries:
    """sum_v g(p^v1, ..., p^vm) x^v truncated at total degree D."""
    if p > eigen.limit:
        raise CoverageError(p, eigen.limit)
    lam = [eigen.lam_prime_power(p, r) for r in range(D + 1)]
    if plus:
        lam = [abs(v) for v in lam]
    w = p / (p + 1)
    coeffs = {}
    for v in exponents_upto(m, D):
        k = sum(v)
        if k == 0:
            coeffs[v] = 1.0
        elif k % 2 == 0:
            c = 1.0
            for r in v:
                c *= lam[r]
            coeffs[v] = c * w
    return TruncatedSeries(m, D, coeffs)


def _L_factors_from_polys(p: int, m: int, D: int, eigen: EigenvalueTable) -> TruncatedSeries:
    """prod_j L_p(2s_j, sym^2) prod_{l<h} zeta_p(s_l+s_h) L_p(s_l+s_h, sym^2), via inverted Euler polys."""
    poly = sym_square_euler_poly(eigen, p)
    total = TruncatedSeries.one(m, D)
    for j in range(m):
        total = total * TruncatedSeries.in_monomial(m, D, _unit(m, j, j), poly)
    for l, h in combinations(range(m), 2):
        y = _unit(m, l, h)
        total = total * TruncatedSeries.in_monomial(m, D, y, [1.0, -1.0])
        total = total * TruncatedSeries.in_monomial(m, D, y, poly)
    return total.inverse()


def _L_factors_from_coefficients(p: int, m: int, D: int, eigen: EigenvalueTable) -> TruncatedSeries:
    """Same product, with each factor expanded from its Dirichlet coefficients at p^k."""
    K = D // 2
    sym = [sym_square_prime_power(eigen, p, k) for k in range(K + 1)]
    zeta = [1.0] * (K + 1)
    total = TruncatedSeries.one(m, D)
    for j in range(m):
        total = total * TruncatedSeries.in_monomial(m, D, _unit(m, j, j), sym)
    for l, h in combinations(range(m), 2):
        y = _unit(m, l, h)
        total = total * TruncatedSeries.in_monomial(m, D, y, zeta)
        total = total * TruncatedSeries.in_monomial(m, D, y, sym)
    return total


def local_factor_E(
    p: int, m: int, D: int, eigen: EigenvalueTable, plus: bool = False
) -> TruncatedSeries:
    """Local E factor: the local G factor divided by the named zeta and sym^2 factors."""
    return local_factor_G(p, m, D, eigen, plus) / _L_factors_from_polys(p, m, D, eigen)


@dataclass(frozen=True)
class FactorizationReport:
    m: int
    degree: int
    primes: tuple[int, ...]
    per_prime: dict = field(repr=False)  # p -> max abs discrepancy
    max_discrepancy: float
    worst_prime: int | None


def verify_factorization(
    p_max: int, m: int, D: int, eigen: EigenvalueTable, plus: bool = False
) -> FactorizationReport:
    """Rebuild each local G factor as (L factors) * E and compare coefficientwise."""
    per = {}
    primes = tuple(primes_up_to(p_max))
    for p in primes:
        G = local_factor_G(p, m, D, eigen, plus)
        E = local_factor_E(p, m, D, eigen, plus)
        rebuilt = _L_factors_from_coefficients(p, m, D, eigen) * E
        per[p] = G.max_abs_diff(rebuilt)
    worst = max(per, key=per.get) if per else None
    return FactorizationReport(m, D, primes, per, per[worst] if per else 0.0, worst)


# -- brute-force P_f -------------------------------------------------------------------


@dataclass(frozen=True)
class _Candidate:
    n: int
    coef: float
    kernel: int
    primes: tuple[int, ...]


def _candidates(Z: float, eigen, w, plus, spf, ker) -> list[_Candidate]:
    lo, hi = support_range(Z, w)
    if hi >= 1 and hi > eigen.limit:
        raise CoverageError(hi, eigen.limit)
    out = []
    for n in range(max(lo, 1), hi + 1):
        lam = eigen.normalized[n]
        c = (abs(lam) if plus else lam) * float(w(n / Z))
        out.append(_Candidate(n, float(c), int(ker[n]), tuple(sorted(factorize(n, spf)))))
    return out


def pf_bruteforce(
    beta: Sequence[float],
    Y: float,
    eigen: EigenvalueTable,
    w: SmoothWeight,
    plus: bool = False,
    budget: int = 10_000_000,
    prune: bool = True,
) -> float:
    """P_f (or P_f+ with plus=True) by enumeration of tuples with square product.

    The recursion carries the squarefree kernel K of the partial product.  A
    branch is cut when K exceeds the product of the remaining coordinates'
    largest values, and the last coordinate is read off a kernel -> values
    index instead of being looped over.  prune=False walks the full box.
    """
    if not beta:
        raise ValueError("beta needs at least one entry")
    scales = [Y ** b for b in beta]
    top = max((support_range(Z, w)[1] for Z in scales), default=1)
    spf = smallest_prime_factor(max(top, 2))
    ker = kernel_table(max(top, 2), spf)
    cands = [_candidates(Z, eigen, w, plus, spf, ker) for Z in scales]
    m = len(cands)
    if any(not c for c in cands):
        return 0.0
    maxima = [max(c.n for c in cs) for cs in cands]
    suffix = [1] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] * maxima[i]
    by_kernel: dict[int, list[_Candidate]] = {}
    for c in cands[-1]:
        by_kernel.setdefault(c.kernel, []).append(c)

    terms: list[float] = []
    visited = 0

    def leaf(chosen: list[_Candidate], K: int, coef: float) -> None:
        if K != 1:
            return
        primes = set()
        for c in chosen:
            primes.update(c.primes)
        terms.append(coef * radical_weight(sorted(primes)))

    def walk(i: int, chosen: list[_Candidate], K: int, coef: float) -> None:
        nonlocal visited
        visited += 1
        if visited > budget:
            raise EnumerationBudgetExceeded(budget, visited, math.fsum(terms))
        if i == m:
            leaf(chosen, K, coef)
            return
        if prune:
            if K > suffix[i]:
                return
            if i == m - 1:
                for c in by_kernel.get(K, ()):
                    visited += 1
                    leaf(chosen + [c], 1, coef * c.coef)
                return
        for c in cands[i]:
            g = math.gcd(K, c.kernel)
            walk(i + 1, chosen + [c], (K // g) * (c.kernel // g), coef * c.coef)

    # the first coordinate starts the running product without a multiplication by 1.0
    for c in cands[0]:
        visited += 1
        if visited > budget:
            raise EnumerationBudgetExceeded(budget, visited, math.fsum(terms))
        if m == 1:
            leaf([c], c.kernel, c.coef)
        else:
            walk(1, [c], c.kernel, c.coef)
    return math.fsum(terms)


@dataclass(frozen=True)
class PfRow:
    Y: float
    beta: tuple[float, ...]
    P: float
    P_plus: float
    envelope: float
    ratio: float
    log_exponent: float


def pf_envelope(beta: Sequence[float], Y: float) -> float:
    m = len(beta)
    return Y ** (sum(beta) / 2) * math.log(Y) ** (m * (m - 3) / 2)


def pf_growth_diagnostic(
    m: int,
    Y_grid: Sequence[float],
    eigen: EigenvalueTable,
    w: SmoothWeight,
    beta: Sequence[float] | None = None,
    budget: int = 10_000_000,
) -> list[PfRow]:
    beta = tuple(beta) if beta is not None else (1.0,) * m
    if len(beta) != m:
        raise ValueError("beta must have m entries")
    rows = []
    for Y in Y_grid:
        P = pf_bruteforce(beta, Y, eigen, w, False, budget)
        Pp = pf_bruteforce(beta, Y, eigen, w, True, budget)
        env = pf_envelope(beta, Y)
        rows.append(PfRow(Y, beta, P, Pp, env, P / env if env else math.nan, m * (m - 3) / 2))
    return rows
