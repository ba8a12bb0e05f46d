"""Plain-text table caches keyed by their header line.

Eigenvalue files hold exact integers, ``n<TAB>a_f(n)`` one per line, under a
``# form=delta weight=12 limit=N`` header.  Sieve files hold one
discriminant per line under ``# <family> X=<bound>``.  SPF tables are cheap
and always rebuilt, but they go through the same interface.  A file whose
header differs from the request, or whose body does not parse completely,
is rebuilt with a warning.
"""

from __future__ import annotations

import hashlib
import math
import os
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .arith import smallest_prime_factor
from .characters import FundamentalDiscriminantSet, sieve_fundamental
from .hecke import EigenvalueTable, build_integer_coefficients, normalize

ENV_VAR = "TWISTLAB_CACHE_DIR"
KINDS = ("eigenvalues", "sieve", "spf")


class CacheWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CacheHandle:
    kind: str
    table: Any
    path: Path | None
    digest: str
    loaded: bool  # True when read back from an existing file


def resolve_cache_dir(flag: str | os.PathLike | None = None) -> Path:
    """Flag beats environment beats ~/.cache/twistlab."""
    if flag:
        return Path(flag)
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "twistlab"


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _bound_text(X: float) -> str:
    return str(int(X)) if float(X).is_integer() else repr(float(X))


# -- serialization ------------------------------------------------------------------


def eigen_header(weight: int, limit: int) -> str:
    return f"# form=delta weight={weight} limit={limit}"


def dump_eigenvalues(table: EigenvalueTable) -> bytes:
    lines = [eigen_header(table.weight, table.limit)]
    lines += [f"{n}\t{table.raw[n]}" for n in range(1, table.limit + 1)]
    return ("\n".join(lines) + "\n").encode()


def load_eigenvalues(data: bytes, weight: int, limit: int) -> EigenvalueTable:
    text = data.decode()
    lines = text.split("\n")
    if lines[0] != eigen_header(weight, limit):
        raise ValueError(f"header mismatch: {lines[0]!r}")
    if not text.endswith("\n") or len(lines) != limit + 2:
        raise ValueError("truncated eigenvalue file")
    raw = [0] * (limit + 1)
    for n, line in enumerate(lines[1:-1], start=1):
        k, v = line.split("\t")
        if int(k) != n:
            raise ValueError(f"line {n} holds index {k}")
        raw[n] = int(v)
    return normalize(EigenvalueTable(weight, limit, raw, np.zeros(0)))


def sieve_header(X: float, family: str) -> str:
    return f"# {family} X={_bound_text(X)}"


def dump_sieve(discs: FundamentalDiscriminantSet) -> bytes:
    lines = [sieve_header(discs.bound, discs.family)] + [str(int(d)) for d in discs.discriminants]
    lines.append(f"# count={discs.count}")
    return ("\n".join(lines) + "\n").encode()


def load_sieve(data: bytes, X: float, family: str) -> FundamentalDiscriminantSet:
    lines = data.decode().split("\n")
    if lines[0] != sieve_header(X, family):
        raise ValueError(f"header mismatch: {lines[0]!r}")
    # the trailing count line makes truncation detectable
    if len(lines) < 3 or lines[-1] != "" or not lines[-2].startswith("# count="):
        raise ValueError("truncated sieve file")
    body = lines[1:-2]
    if int(lines[-2].split("=", 1)[1]) != len(body):
        raise ValueError("sieve file count does not match its body")
    d = np.array([int(x) for x in body], dtype=np.int64)
    if len(d) and (np.any(np.diff(d) <= 0) or d[0] < 1 or d[-1] > X):
        raise ValueError("sieve file body is not an ascending list within the bound")
    return FundamentalDiscriminantSet(X, d, family)


# -- entry point -----------------------------------------------------------------------


def _file_name(kind: str, params: dict) -> str:
    if kind == "eigenvalues":
        return f"eigen_w{params.get('weight', 12)}_{params['limit']}.txt"
    return f"sieve_{params.get('family', 'fundamental')}_{_bound_text(params['X'])}.txt"


def cache_get_or_build(kind: str, params: dict, cache_dir: str | os.PathLike | None = None) -> CacheHandle:
    """Load a validated cached table or build and persist it.

    params: eigenvalues -> {limit, weight=12}; sieve -> {X, family};
    spf -> {limit}.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown cache kind {kind!r}; choose from {KINDS}")
    if kind == "spf":
        spf = smallest_prime_factor(int(params["limit"]))
        return CacheHandle(kind, spf, None, _digest(spf.tobytes()), False)

    root = resolve_cache_dir(cache_dir)
    root.mkdir(parents=True, exist_ok=True)
    path = root / _file_name(kind, params)
    if kind == "eigenvalues":
        weight, limit = int(params.get("weight", 12)), int(params["limit"])
        build = lambda: build_integer_coefficients(weight, limit)  # noqa: E731
        load = lambda b: load_eigenvalues(b, weight, limit)  # noqa: E731
        dump = dump_eigenvalues
    else:
        X, family = float(params["X"]), params.get("family", "fundamental")
        X = math.floor(X) if X.is_integer() else X
        build = lambda: sieve_fundamental(X, family)  # noqa: E731
        load = lambda b: load_sieve(b, X, family)  # noqa: E731
        dump = dump_sieve

    if path.exists():
        data = path.read_bytes()
        try:
            table = load(data)
        except (ValueError, UnicodeDecodeError) as exc:
            warnings.warn(f"rebuilding cache file {path}: {exc}", CacheWarning, stacklevel=2)
        else:
            return CacheHandle(kind, table, path, _digest(data), True)

    table = build()
    data = dump(table)
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)
    return CacheHandle(kind, table, path, _digest(data), False)
