"""Compactly supported smooth weights and their Mellin transforms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import QuadratureFailure

_GL_ORDER = 16
_GL_X, _GL_W = leggauss(_GL_ORDER)


@dataclass(frozen=True)
class SmoothWeight:
    """scale * exp(-1/((x-a)(b-x))) on (a, b), zero elsewhere."""

    a: float = 1.0
    b: float = 2.0
    scale: float = 1.0
    shape: str = "bump"

    def __post_init__(self):
        if not (0 < self.a < self.b):
            raise ValueError(f"bump needs 0 < a < b, got ({self.a}, {self.b})")
        if self.scale < 0:
            raise ValueError("weight scale must be non-negative")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros_like(x)
        inside = (x > self.a) & (x < self.b)
        xi = x[inside]
        out[inside] = self.scale * np.exp(-1.0 / ((xi - self.a) * (self.b - xi)))
        return out if out.ndim else float(out)

    def scaled(self, c: float) -> "SmoothWeight":
        return SmoothWeight(self.a, self.b, self.scale * c, self.shape)

    @property
    def spec(self) -> str:
        return f"bump:{self.a:g},{self.b:g}"


def bump(a: float = 1.0, b: float = 2.0) -> SmoothWeight:
    if a >= b:
        raise ValueError(f"bump support needs a < b, got ({a}, {b})")
    return SmoothWeight(a, b)


def parse_weight(text: str) -> SmoothWeight:
    """Parse the CLI form ``bump:a,b``."""
    kind, _, params = text.partition(":")
    if kind != "bump":
        raise ValueError(f"unknown weight family {kind!r} (only 'bump' is available)")
    if not params:
        return bump()
    try:
        a, b = (float(v) for v in params.split(","))
    except ValueError:
        raise ValueError(f"cannot parse weight parameters {params!r}; expected a,b") from None
    return bump(a, b)


@dataclass(frozen=True)
class MellinValue:
    s: complex
    value: complex
    quadrature_error: float


def _panel(w: SmoothWeight, s: complex, lo: float, hi: float) -> complex:
    half = 0.5 * (hi - lo)
    x = half * _GL_X + 0.5 * (hi + lo)
    f = w(x) * np.exp((s - 1) * np.log(x))
    return half * complex(np.dot(_GL_W, f))


def mellin(w: SmoothWeight, s: complex, tol: float = 1e-13, max_panels: int = 20000) -> MellinValue:
    """int_0^oo w(x) x^(s-1) dx by adaptive Gauss-Legendre bisection on [a, b].

    Panels are refined depth-first, left to right, so the result is a pure
    function of (w, s, tol).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = complex(s)
    if w.scale == 0:
        return MellinValue(s, 0j, 0.0)
    length = w.b - w.a
    edges = np.linspace(w.a, w.b, 9)
    stack = [(float(l), float(r), _panel(w, s, l, r)) for l, r in zip(edges[-2::-1], edges[:0:-1])]
    total = 0j
    err = 0.0
    used = 0
    while stack:
        lo, hi, coarse = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(w, s, lo, mid)
        right = _panel(w, s, mid, hi)
        fine = left + right
        diff = abs(fine - coarse)
        used += 1
        if diff <= tol * (hi - lo) / length or hi - lo < 1e-12 * length:
            total += fine
            err += diff
        elif used > max_panels:
            total += fine
            err += diff
            for l2, h2, c2 in stack:
                total += c2
            raise QuadratureFailure("panel budget exhausted before reaching tolerance", total, err)
        else:
            stack.append((mid, hi, right))
            stack.append((lo, mid, left))
    if err > tol:
        raise QuadratureFailure(f"tolerance {tol:g} not reached", total, err)
    return MellinValue(s, total, err)


@dataclass(frozen=True)
class DecayReport:
    E: int
    sup: float
    argmax: complex
    t_max: float
    grid_points: int


def verify_decay(
    w: SmoothWeight,
    E: int,
    sigma_range: tuple[float, float] = (0.5, 2.0),
    t_max: float = 100.0,
    n_sigma: int = 4,
    t_step: float = 1.0,
    tol: float = 1e-15,
) -> DecayReport:
    """Grid sup of |mellin(w, s)| (1 + |s|)^E over sigma in sigma_range, 0 <= t <= t_max.

    The transform of a real weight satisfies conj symmetry in t, so only t >= 0
    is sampled.
    """
    if not 0 <= E <= 4:
        raise ValueError("decay order E must lie in 0..4")
    sigmas = np.linspace(sigma_range[0], sigma_range[1], n_sigma)
    ts = np.arange(0.0, t_max + 0.5 * t_step, t_step)
    best, where = -1.0, 0j
    for sigma in sigmas:
        for t in ts:
            s = complex(sigma, t)
            v = abs(mellin(w, s, tol).value) * (1 + abs(s)) ** E
            if v > best:
                best, where = v, s
    if not math.isfinite(best):
        raise QuadratureFailure("non-finite Mellin value on the decay grid", best, math.inf)
    return DecayReport(E, best, where, t_max, len(sigmas) * len(ts))


def derivative_bounds(w: SmoothWeight, max_order: int = 4, h: float | None = None) -> list[float]:
    """Max over [a, b] of |central finite-difference derivative| for orders 0..max_order."""
    if h is None:
        h = (w.b - w.a) / 2000
    x = np.arange(w.a - 4 * h, w.b + 4 * h, h)
    f = w(x)
    out = [float(np.max(np.abs(f)))]
    g = f
    for _ in range(max_order):
        g = np.gradient(g, h)
        out.append(float(np.max(np.abs(g))))
    return out
