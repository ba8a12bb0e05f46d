"""Kronecker symbols, discriminant sieves and the quadratic character average."""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np

from .arith import factorize, is_square, smallest_prime_factor, squarefree_flags
from .arith import squarefree_kernel  # noqa: F401  re-exported for the series code

FAMILIES = ("fundamental", "odd-squarefree", "squarefree")


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) for n >= 1, by quadratic reciprocity."""
    if d == 0:
        raise ValueError("kronecker symbol needs d != 0")
    if n < 1:
        raise ValueError("kronecker symbol needs n >= 1")
    a, b = d, n
    if a % 2 == 0 and b % 2 == 0:
        return 0
    v = 0
    while b % 2 == 0:
        b //= 2
        v += 1
    t = 1
    if v % 2 and a % 8 in (3, 5):
        t = -1
    # b is now odd and positive; reduce (a/b) as a Jacobi symbol
    a %= b
    while a:
        while a % 2 == 0:
            a //= 2
            if b % 8 in (3, 5):
                t = -t
        a, b = b, a
        if a % 4 == 3 and b % 4 == 3:
            t = -t
        a %= b
    return t if b == 1 else 0


def is_fundamental(d: int) -> bool:
    """Direct check of the definition for positive d (d = 1 admitted)."""
    if d < 1:
        return False
    if d % 4 == 1:
        return squarefree_kernel(d) == d
    if d % 4 == 0:
        n = d // 4
        return n % 4 in (2, 3) and squarefree_kernel(n) == n
    return False


@dataclass(frozen=True)
class FundamentalDiscriminantSet:
    """Sorted positive discriminants d <= bound for one family.

    ``tops`` holds the top argument of the Kronecker symbol attached to each
    d: d itself, except for the odd-squarefree family which uses chi_{8d}.
    """

    bound: float
    discriminants: np.ndarray = field(repr=False)
    family: str = "fundamental"

    @property
    def count(self) -> int:
        return int(len(self.discriminants))

    @property
    def tops(self) -> np.ndarray:
        if self.family == "odd-squarefree":
            return 8 * self.discriminants
        return self.discriminants

    def __contains__(self, d) -> bool:
        i = int(np.searchsorted(self.discriminants, d))
        return i < len(self.discriminants) and int(self.discriminants[i]) == d

    def __len__(self) -> int:
        return self.count

    def upto(self, X: float) -> "FundamentalDiscriminantSet":
        k = int(np.searchsorted(self.discriminants, math.floor(X), side="right"))
        return FundamentalDiscriminantSet(X, self.discriminants[:k], self.family)


def sieve_fundamental(X: float, family: str = "fundamental") -> FundamentalDiscriminantSet:
    """All positive discriminants d <= X of the requested family, ascending."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    N = int(math.floor(X))
    if N < 1:
        return FundamentalDiscriminantSet(X, np.zeros(0, dtype=np.int64), family)
    sf = squarefree_flags(N)
    d = np.arange(N + 1, dtype=np.int64)
    if family == "squarefree":
        out = d[sf]
    elif family == "odd-squarefree":
        out = d[sf & (d % 2 == 1)]
    else:
        odd = d[sf & (d % 4 == 1)]
        M = N // 4
        n = d[: M + 1]
        even = 4 * n[sf[: M + 1] & ((n % 4 == 2) | (n % 4 == 3))]
        out = np.sort(np.concatenate([odd, even]))
    return FundamentalDiscriminantSet(X, out.astype(np.int64), family)


# -- vectorized characters -------------------------------------------------------


@lru_cache(maxsize=None)
def _legendre_table(p: int) -> np.ndarray:
    r = np.arange(p, dtype=np.int64)
    tab = np.array([pow(int(x), (p - 1) // 2, p) for x in r], dtype=np.int64)
    tab[tab == p - 1] = -1
    tab = tab.astype(np.int8)
    tab.flags.writeable = False
    return tab


_TWO_TABLE = np.array([0, 1, 0, -1, 0, -1, 0, 1], dtype=np.int8)


def chi_at_prime(tops: np.ndarray, p: int) -> np.ndarray:
    """(D/p) for every D in `tops` (int8 vector)."""
    if p == 2:
        return _TWO_TABLE[tops % 8]
    return _legendre_table(p)[tops % p]


def kronecker_vec(tops: np.ndarray, n: int) -> np.ndarray:
    """(D/n) for every D in `tops` with n >= 1, via complete multiplicativity."""
    out = np.ones(len(tops), dtype=np.int8)
    for p, e in factorize(n).items():
        c = chi_at_prime(tops, p)
        if e % 2:
            out *= c
        else:
            out *= c * c
    return out


def character_matrix(tops: np.ndarray, nmax: int, spf: np.ndarray | None = None) -> np.ndarray:
    """M[i, n] = (tops[i] / n) for 0 <= n <= nmax; column 0 is zero."""
    if spf is None or len(spf) <= nmax:
        spf = smallest_prime_factor(max(nmax, 1))
    M = np.zeros((len(tops), nmax + 1), dtype=np.int8)
    if nmax >= 1:
        M[:, 1] = 1
    for n in range(2, nmax + 1):
        p = int(spf[n])
        if p == n:
            M[:, n] = chi_at_prime(tops, p)
        else:
            np.multiply(M[:, p], M[:, n // p], out=M[:, n])
    return M


# -- character average -------------------------------------------------------------


@dataclass(frozen=True)
class CharacterAverageReport:
    n: int
    X: float
    computed_sum: float
    main_term: float
    residual: float
    family: str = "fundamental"
    count: int = 0


def character_main_term(n: int, X: float) -> float:
    """(6/pi^2) X prod_{p | n} p/(p+1) on squares, 0 otherwise."""
    if not is_square(n):
        return 0.0
    prod = 1.0
    for p in factorize(n):
        prod *= p / (p + 1)
    return 6.0 / math.pi ** 2 * X * prod


def character_envelope(n: int, X: float) -> float:
    """Error allowance 10 X^(1/2) n^(1/4) log(n+2) log X for the average at n."""
    return 10.0 * math.sqrt(X) * n ** 0.25 * math.log(n + 2) * math.log(X)


def character_average(
    n: int,
    X: float,
    family: str = "fundamental",
    discs: FundamentalDiscriminantSet | None = None,
) -> CharacterAverageReport:
    """Sum of chi_d(n) over the family up to X, against the square-indicator main term."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if discs is None or discs.family != family or discs.bound < X:
        discs = sieve_fundamental(X, family)
    elif discs.bound > X:
        discs = discs.upto(X)
    total = int(kronecker_vec(discs.tops, n).sum(dtype=np.int64))
    main = character_main_term(n, X)
    computed = float(total)
    return CharacterAverageReport(n, X, computed, main, computed - main, family, discs.count)
