"""Sparse truncated power series in several variables.

Monomials are exponent tuples; every operation drops terms of total degree
above the cutoff ``degree``.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping

Exponent = tuple[int, ...]


def exponents_upto(nvars: int, degree: int) -> Iterable[Exponent]:
    """All exponent tuples of total degree <= degree, in lexicographic order."""
    for v in product(range(degree + 1), repeat=nvars):
        if sum(v) <= degree:
            yield v


class TruncatedSeries:
    __slots__ = ("nvars", "degree", "coeffs")

    def __init__(self, nvars: int, degree: int, coeffs: Mapping[Exponent, float] | None = None):
        self.nvars = nvars
        self.degree = degree
        self.coeffs: dict[Exponent, float] = {}
        for k, c in (coeffs or {}).items():
            if len(k) != nvars:
                raise ValueError(f"exponent {k} has wrong arity for {nvars} variables")
            if sum(k) <= degree and c != 0:
                self.coeffs[tuple(k)] = float(c)

    @classmethod
    def one(cls, nvars: int, degree: int) -> "TruncatedSeries":
        return cls(nvars, degree, {(0,) * nvars: 1.0})

    @classmethod
    def in_monomial(
        cls, nvars: int, degree: int, monomial: Exponent, coeffs: Iterable[float]
    ) -> "TruncatedSeries":
        """sum_k coeffs[k] * y^k with y the given monomial."""
        step = sum(monomial)
        out = {}
        for k, c in enumerate(coeffs):
            if step * k > degree:
                break
            if step == 0 and k > 0:
                raise ValueError("substituting the constant monomial is not a power series")
            out[tuple(k * e for e in monomial)] = c
        return cls(nvars, degree, out)

    def __getitem__(self, key: Exponent) -> float:
        return self.coeffs.get(tuple(key), 0.0)

    def constant(self) -> float:
        return self[(0,) * self.nvars]

    def _check(self, other: "TruncatedSeries") -> int:
        if self.nvars != other.nvars:
            raise ValueError("series in different numbers of variables")
        return min(self.degree, other.degree)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        D = self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0.0) + c
        return TruncatedSeries(self.nvars, D, out)

    def __neg__(self) -> "TruncatedSeries":
        return self.scale(-1.0)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def scale(self, c: float) -> "TruncatedSeries":
        return TruncatedSeries(self.nvars, self.degree, {k: c * v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(other)
        D = self._check(other)
        out: dict[Exponent, float] = {}
        for ka, ca in self.coeffs.items():
            da = sum(ka)
            for kb, cb in other.coeffs.items():
                if da + sum(kb) > D:
                    continue
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out.get(k, 0.0) + ca * cb
        return TruncatedSeries(self.nvars, D, out)

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedSeries":
        """1/f for f with nonzero constant term: (1/c) sum_k (-g)^k with f = c (1 + g)."""
        c = self.constant()
        if c == 0:
            raise ZeroDivisionError("series with zero constant term has no inverse")
        g = self.scale(1.0 / c) - TruncatedSeries.one(self.nvars, self.degree)
        term = TruncatedSeries.one(self.nvars, self.degree)
        total = TruncatedSeries.one(self.nvars, self.degree)
        for _ in range(self.degree):
            term = term * (-g)
            if not term.coeffs:
                break
            total = total + term
        return total.scale(1.0 / c)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(1.0 / other)
        return self * other.inverse()

    def homogeneous(self, k: int) -> dict[Exponent, float]:
        return {e: c for e, c in self.coeffs.items() if sum(e) == k}

    def max_abs_diff(self, other: "TruncatedSeries") -> float:
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(self[k] - other[k]) for k in keys), default=0.0)

    def __repr__(self) -> str:
        return f"TruncatedSeries(nvars={self.nvars}, degree={self.degree}, terms={len(self.coeffs)})"
