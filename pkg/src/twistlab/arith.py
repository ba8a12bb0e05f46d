"""Elementary arithmetic tables shared by the other modules.

Everything here is sieve-based and returns numpy arrays indexed by n, with
index 0 unused.
"""

from __future__ import annotations

import math

import numpy as np


def smallest_prime_factor(limit: int) -> np.ndarray:
    """spf[n] = smallest prime dividing n for 2 <= n <= limit (spf[0] = spf[1] = 0)."""
    limit = max(int(limit), 1)
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest
    return spf


def primes_up_to(limit: int) -> list[int]:
    if limit < 2:
        return []
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return [int(p) for p in np.flatnonzero(flags)]


def divisor_counts(limit: int) -> np.ndarray:
    """d(n) for 0 <= n <= limit by the additive divisor sieve."""
    d = np.zeros(limit + 1, dtype=np.int64)
    for k in range(1, limit + 1):
        d[k::k] += 1
    return d


def squarefree_flags(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[0] = False
    for k in range(2, math.isqrt(limit) + 1):
        flags[k * k :: k * k] = False
    return flags


def factorize(n: int, spf: np.ndarray | None = None) -> dict[int, int]:
    """Prime factorization of n >= 1 (spf table when it covers n, trial division otherwise)."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    if spf is not None and n < len(spf):
        while n > 1:
            p = int(spf[n])
            out[p] = out.get(p, 0) + 1
            n //= p
        return out
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def squarefree_kernel(n: int) -> int:
    """Product of the primes dividing n to an odd power; equals 1 iff n is a square."""
    if n < 1:
        raise ValueError("squarefree_kernel needs n >= 1")
    k = 1
    for p, e in factorize(n).items():
        if e % 2:
            k *= p
    return k


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def kernel_table(limit: int, spf: np.ndarray | None = None) -> np.ndarray:
    """Squarefree kernel for every n <= limit."""
    if spf is None:
        spf = smallest_prime_factor(limit)
    ker = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        ker[1] = 1
    for n in range(2, limit + 1):
        p = int(spf[n])
        q = ker[n // p]
        ker[n] = q // p if q % p == 0 else q * p
    return ker


def radical_factor(primes) -> float:
    """prod over the given distinct primes of (1 + 1/p)^-1 = p/(p+1)."""
    out = 1.0
    for p in primes:
        out *= p / (p + 1)
    return out
