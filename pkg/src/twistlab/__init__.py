"""Numerical experiments on moments of quadratic twists of the discriminant form.

Modules: hecke (exact tau(n) and normalized eigenvalues), characters
(Kronecker symbols and discriminant sieves), weights (smooth bump and its
Mellin transform), moments (twisted sums, moments, Hoelder check), series and
squares (local Euler factors and the square-product sums P_f), kernels
(piecewise kernels and region integrals), cache and cli.
"""

__version__ = "0.1.0"

from .hecke import EigenvalueTable, build_integer_coefficients  # noqa: E402
from .characters import sieve_fundamental, kronecker, character_average  # noqa: E402
from .weights import SmoothWeight, bump, mellin  # noqa: E402
from .moments import moment_T, moment_S, moment_T_sharp, holder_check, twisted_sum  # noqa: E402
from .squares import pf_bruteforce, verify_factorization  # noqa: E402
from .kernels import KernelParams, RegionSpec, region_integral  # noqa: E402

__all__ = [
    "EigenvalueTable", "build_integer_coefficients", "sieve_fundamental", "kronecker",
    "character_average", "SmoothWeight", "bump", "mellin", "moment_T", "moment_S",
    "moment_T_sharp", "holder_check", "twisted_sum", "pf_bruteforce", "verify_factorization",
    "KernelParams", "RegionSpec", "region_integral",
]
