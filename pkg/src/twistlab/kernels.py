"""The piecewise kernels g1, g2 and Monte-Carlo region integrals I_{m,B,k}.

Breakpoints follow the listed case order: the first branch whose condition
holds wins.  The e^X breakpoints are compared as log x >= X so that large X
never overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation

E_E = math.exp(math.e)


@dataclass(frozen=True)
class KernelParams:
    X: float
    B: float = 10.0

    def __post_init__(self):
        if self.X < 3:
            raise ValueError("kernel parameters need X >= 3")
        if self.B < 10:
            raise ValueError("kernel parameters need B >= 10")

    @property
    def logX(self) -> float:
        return math.log(self.X)


@dataclass(frozen=True)
class RegionSpec:
    m: int
    k: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("region arity must be >= 1")
        if self.k not in (1, 2, 3):
            raise ValueError("region index must be 1, 2 or 3")

    def interval(self, params: KernelParams) -> tuple[float, float]:
        L = params.logX
        lo, hi = {1: (0.0, 1 / (2 * L)), 2: (1 / (2 * L), 5.0), 3: (5.0, params.B)}[self.k]
        if not 0 <= lo < hi:
            raise ValueError(f"region I_{self.k} is empty for X={params.X}, B={params.B}")
        return lo, hi


def g1(x, params: KernelParams):
    """log X on [0, 1/log X] and beyond e^X; 1/x up to 10; log log x up to e^X."""
    x = np.asarray(x, dtype=np.float64)
    L = params.logX
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        logx = np.log(x)
        out = np.where(
            (x <= 1 / L) | (logx >= params.X),
            L,
            np.where(x <= 10, 1 / x, np.log(logx)),
        )
    return out if out.ndim else float(out)


def g2(x, params: KernelParams):
    """1 up to e^e; log log x up to e^X; log X beyond."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        logx = np.log(x)
        out = np.where(x <= E_E, 1.0, np.where(logx <= params.X, np.log(logx), params.logX))
    return out if out.ndim else float(out)


def log_integrand(t: np.ndarray, params: KernelParams) -> np.ndarray:
    """log of prod_{i<j} g1(|ti-tj|)^(1/2) g1(ti+tj)^(1/2) prod_i g1(2 ti)^(-1/4); rows are points."""
    t = np.atleast_2d(np.asarray(t, dtype=np.float64))
    m = t.shape[1]
    acc = -0.25 * np.log(g1(np.abs(2 * t), params)).sum(axis=1)
    for i in range(m):
        for j in range(i + 1, m):
            acc += 0.5 * np.log(g1(np.abs(t[:, i] - t[:, j]), params))
            acc += 0.5 * np.log(g1(np.abs(t[:, i] + t[:, j]), params))
    return acc


def integrand(t, params: KernelParams):
    """The kernel product at one point (1-d input) or at every row (2-d input)."""
    arr = np.asarray(t, dtype=np.float64)
    out = np.exp(log_integrand(arr, params))
    return float(out[0]) if arr.ndim == 1 else out


@dataclass(frozen=True)
class RegionEstimate:
    m: int
    k: int
    X: float
    B: float
    estimate: float
    stderr: float
    samples: int
    seed: int


def _batch_stream(seed: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(batch))


def region_integral(
    spec: RegionSpec,
    params: KernelParams,
    samples: int = 100_000,
    seed: int = 0,
    batch_size: int = 1 << 16,
) -> RegionEstimate:
    """(log X)^(m/4) times the integral of the kernel product over the ordered simplex in I_k^m.

    Points are drawn uniformly in the cube I_k^m and sorted; by permutation
    symmetry the simplex integral is the cube integral divided by m!.  Each
    batch has its own Philox substream, and batch statistics are merged in
    batch order.
    """
    if samples < 1000:
        raise ValueError("region_integral needs at least 1000 samples")
    m = spec.m
    lo, hi = spec.interval(params)
    scale = params.logX ** (m / 4) * (hi - lo) ** m / math.factorial(m)
    count = 0
    mean = 0.0
    m2 = 0.0
    for b, start in enumerate(range(0, samples, batch_size)):
        n = min(batch_size, samples - start)
        rng = _batch_stream(seed, b)
        t = np.sort(lo + (hi - lo) * rng.random((n, m)), axis=1)
        f = integrand(t, params)
        if not np.all(np.isfinite(f)):
            raise InvariantViolation("non-finite kernel value; breakpoint handling is broken")
        bm = math.fsum(f) / n
        bm2 = math.fsum((f - bm) ** 2)
        delta = bm - mean
        total = count + n
        mean += delta * n / total
        m2 += bm2 + delta * delta * count * n / total
        count = total
    var = m2 / (count - 1)
    return RegionEstimate(m, spec.k, params.X, params.B, scale * mean, scale * math.sqrt(var / count), count, seed)


def region1_exact(m: int, params: KernelParams) -> float:
    """I_{m,B,1} in closed form: the kernel is the constant (log X)^(m(m-1)/2 - m/4) there."""
    L = params.logX
    return L ** (m * (m - 1) / 2) * (2 * L) ** (-m) / math.factorial(m)


@dataclass(frozen=True)
class Region3Row:
    B: float
    estimate: float
    stderr: float
    envelope: float
    ratio: float
    log_exponent: float


def region3_scaling(
    m: int, X: float, B_grid, samples: int = 100_000, seed: int = 0
) -> list[Region3Row]:
    """I_{m,B,3} against B^2 (log X)^(m(m-3)/2) for each B."""
    rows = []
    expo = m * (m - 3) / 2
    for B in B_grid:
        params = KernelParams(X, B)
        est = region_integral(RegionSpec(m, 3), params, samples, seed)
        env = B ** 2 * params.logX ** expo
        rows.append(Region3Row(B, est.estimate, est.stderr, env, est.estimate / env, expo))
    return rows
