"""Command-line front end: ``twistlab <subcommand> [options]``.

Every run writes CSV (to --csv or stdout) ending in a ``# manifest: PATH``
comment line, plus a JSON manifest with the resolved config, cache digests,
wall time and output list.  Usage errors exit with status 2, budget /
coverage / numerical errors with status 3; either way a one-line JSON error
record goes to stderr.

The ``seconds`` column is left empty unless --record-timing is given, so
that reruns with the same config are byte-identical; wall time always goes
to the manifest.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
from pathlib import Path

from . import __version__
from .cache import cache_get_or_build, resolve_cache_dir
from .characters import FAMILIES, character_average, character_envelope
from .errors import BudgetError, TwistlabError, UsageError
from .kernels import KernelParams, RegionSpec, region1_exact, region3_scaling, region_integral
from .moments import KINDS, holder_check, moment, support_range
from .squares import pf_bruteforce, pf_envelope, verify_factorization
from .weights import parse_weight

# desk-scale budgets checked before dispatch
MAX_X = 10 ** 8
MAX_LIMIT = 2 * 10 ** 6
MAX_SAMPLES = 10 ** 9
MAX_PMAX = 1000
MAX_DEGREE = 12
MAX_M = 12

MOMENT_COLUMNS = ["X", "Y", "m", "family", "moment", "count", "predicted", "ratio", "seconds"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse integer list {text!r}") from None


def _num(text: str) -> float:
    """Accepts 1e5 style input for integer-valued parameters."""
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


# -- run context ------------------------------------------------------------------------


class Run:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.cache_dir = resolve_cache_dir(args.cache_dir)
        self.caches: list[dict] = []
        self.outputs: list[str] = []
        self.t0 = time.perf_counter()

    def eigen(self, limit: int):
        limit = max(int(limit), 1)
        if limit > MAX_LIMIT:
            raise BudgetError(f"eigenvalue table of size {limit} exceeds the budget {MAX_LIMIT}")
        h = cache_get_or_build("eigenvalues", {"limit": limit, "weight": 12}, self.cache_dir)
        self._note(h)
        return h.table

    def discs(self, X: float, family: str):
        h = cache_get_or_build("sieve", {"X": X, "family": family}, self.cache_dir)
        self._note(h)
        return h.table

    def _note(self, h) -> None:
        self.caches.append(
            {"kind": h.kind, "path": str(h.path) if h.path else None, "digest": h.digest, "loaded": h.loaded}
        )

    def config(self) -> dict:
        cfg = {k: v for k, v in sorted(vars(self.args).items()) if k != "func"}
        cfg["cache_dir"] = str(self.cache_dir)
        return cfg

    def manifest_path(self) -> Path:
        if self.args.csv:
            return Path(str(self.args.csv) + ".manifest.json")
        blob = json.dumps(self.config(), sort_keys=True, default=str).encode()
        tag = hashlib.sha256(blob).hexdigest()[:16]
        return self.cache_dir / "manifests" / f"{self.args.command}-{tag}.json"

    def emit(self, columns: list[str], rows: list[dict]) -> None:
        mpath = self.manifest_path()
        buf = io.StringIO(newline="")
        w = csv.writer(buf)
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r.get(c, "")) for c in columns])
        buf.write(f"# manifest: {mpath}\r\n")
        text = buf.getvalue()
        if self.args.csv:
            Path(self.args.csv).write_text(text, newline="")
            self.outputs.append(str(self.args.csv))
        else:
            sys.stdout.write(text)
        self.write_manifest(mpath)

    def extra_output(self, path: Path, text: str) -> None:
        path.write_text(text)
        self.outputs.append(str(path))

    def write_manifest(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        manifest = {
            "tool": "twistlab",
            "version": __version__,
            "command": self.args.command,
            "config": self.config(),
            "caches": self.caches,
            "wall_seconds": time.perf_counter() - self.t0,
            "outputs": self.outputs,
        }
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")


def _seconds(run: Run, s: float):
    return s if run.args.record_timing else ""


def _check_X(X: float) -> None:
    if not 1 <= X <= MAX_X:
        raise BudgetError(f"X = {X:g} outside the supported range [1, {MAX_X:g}]")


def _eigen_limit_for(kind: str, Y: float, w) -> int:
    return math.floor(Y) if kind == "T-sharp" else support_range(Y, w)[1]


# -- subcommands --------------------------------------------------------------------------


def cmd_eigenvalues(run: Run) -> None:
    a = run.args
    eigen = run.eigen(int(a.limit))
    if a.out:
        src = Path(run.caches[-1]["path"])
        run.extra_output(Path(a.out), src.read_text())
    rows = [{"n": n, "a_f": eigen.raw[n], "lambda": float(eigen.normalized[n])} for n in range(1, eigen.limit + 1)]
    run.emit(["n", "a_f", "lambda"], rows)


def cmd_sieve(run: Run) -> None:
    a = run.args
    _check_X(a.x)
    discs = run.discs(a.x, a.family)
    if a.out:
        src = Path(run.caches[-1]["path"])
        run.extra_output(Path(a.out), src.read_text())
    run.emit(["d"], [{"d": int(d)} for d in discs.discriminants])


def cmd_char_average(run: Run) -> None:
    a = run.args
    _check_X(a.x)
    discs = run.discs(a.x, a.family)
    rows = []
    for n in _ints(a.n):
        if n < 1:
            raise UsageError("--n entries must be >= 1")
        r = character_average(n, a.x, a.family, discs)
        env = character_envelope(n, a.x)
        rows.append({
            "n": n, "X": a.x, "family": a.family, "count": r.count, "computed": r.computed_sum,
            "main_term": r.main_term, "residual": r.residual, "envelope": env,
            "within": int(abs(r.residual) <= env),
        })
    run.emit(["n", "X", "family", "count", "computed", "main_term", "residual", "envelope", "within"], rows)


def _moment_row(run: Run, r) -> dict:
    return {
        "X": r.X, "Y": r.Y, "m": r.m, "family": r.family, "moment": r.moment,
        "count": r.discriminant_count, "predicted": r.predicted, "ratio": r.ratio,
        "seconds": _seconds(run, r.seconds),
    }


def cmd_moments(run: Run) -> None:
    a = run.args
    _check_X(a.x)
    if a.m < 0:
        raise UsageError("--m must be non-negative")
    w = None if a.kind == "T-sharp" else parse_weight(a.phi)
    eigen = None if a.kind == "S" else run.eigen(_eigen_limit_for(a.kind, a.y, w))
    discs = run.discs(a.x, a.family)
    r = moment(a.kind, a.x, a.y, a.m, eigen, w, a.family, discs, a.threads)
    run.emit(MOMENT_COLUMNS, [_moment_row(run, r)])


def cmd_holder(run: Run) -> None:
    a = run.args
    _check_X(a.x)
    w = parse_weight(a.phi)
    eigen = run.eigen(support_range(a.y, w)[1])
    discs = run.discs(a.x, a.family)
    rows = []
    for eps in _floats(a.eps):
        h = holder_check(a.x, a.y, a.m, eps, eigen, w, a.family, discs, a.threads)
        rows.append({"X": a.x, "Y": a.y, "m": h.m, "epsilon": eps, "H1": h.H1, "H2": h.H2,
                     "T": h.Tm, "slack": h.slack, "relative_slack": h.relative_slack})
    run.emit(["X", "Y", "m", "epsilon", "H1", "H2", "T", "slack", "relative_slack"], rows)


def cmd_verify_euler(run: Run) -> None:
    a = run.args
    if not 1 <= a.m <= MAX_M:
        raise UsageError(f"--m must lie in 1..{MAX_M}")
    if a.pmax > MAX_PMAX or a.degree > MAX_DEGREE:
        raise BudgetError(f"verify-euler supports pmax <= {MAX_PMAX}, degree <= {MAX_DEGREE}")
    eigen = run.eigen(max(a.pmax, 2))
    rep = verify_factorization(a.pmax, a.m, a.degree, eigen, a.plus)
    run.emit(
        ["m", "degree", "pmax", "plus", "primes", "max_discrepancy", "worst_prime"],
        [{"m": a.m, "degree": a.degree, "pmax": a.pmax, "plus": int(a.plus), "primes": len(rep.primes),
          "max_discrepancy": rep.max_discrepancy, "worst_prime": rep.worst_prime or ""}],
    )


def _beta(a) -> tuple[float, ...]:
    if a.beta:
        beta = tuple(_floats(a.beta))
        if a.m is not None and len(beta) != a.m:
            raise UsageError(f"--beta has {len(beta)} entries but --m is {a.m}")
    elif a.m is not None:
        beta = (1.0,) * a.m
    else:
        raise UsageError("pf needs --m or --beta")
    if not beta or any(b <= 0 for b in beta):
        raise UsageError("beta entries must be positive")
    return beta


def cmd_pf(run: Run) -> None:
    a = run.args
    beta = _beta(a)
    w = parse_weight(a.phi)
    top = max(support_range(a.y ** b, w)[1] for b in beta)
    eigen = run.eigen(top)
    P = pf_bruteforce(beta, a.y, eigen, w, a.plus, a.budget)
    env = pf_envelope(beta, a.y)
    run.emit(
        ["m", "beta", "Y", "plus", "P", "envelope", "ratio"],
        [{"m": len(beta), "beta": ",".join(_fmt(b) for b in beta), "Y": a.y, "plus": int(a.plus),
          "P": P, "envelope": env, "ratio": P / env if env else float("nan")}],
    )


def cmd_kernels(run: Run) -> None:
    a = run.args
    if a.samples > MAX_SAMPLES:
        raise BudgetError(f"{a.samples} samples exceed the budget {MAX_SAMPLES}")
    params = KernelParams(a.x, a.b)
    est = region_integral(RegionSpec(a.m, a.k), params, a.samples, a.seed)
    exact = region1_exact(a.m, params) if a.k == 1 else ""
    run.emit(
        ["m", "k", "X", "B", "samples", "seed", "estimate", "stderr", "exact"],
        [{"m": a.m, "k": a.k, "X": a.x, "B": a.b, "samples": est.samples, "seed": a.seed,
          "estimate": est.estimate, "stderr": est.stderr, "exact": exact}],
    )


def _plot_path(run: Run, suffix: str) -> Path:
    base = Path(run.args.csv) if run.args.csv else run.manifest_path().with_suffix("")
    return base.with_name(base.name + suffix)


def _two_column(pairs) -> str:
    return "".join(f"{_fmt(float(x))} {_fmt(float(y))}\n" for x, y in pairs)


def cmd_scan(run: Run) -> None:
    a = run.args
    if a.target == "moments":
        grid = _floats(a.x_grid or "")
        if not grid:
            raise UsageError("scan --target moments needs --x-grid")
        for X in grid:
            _check_X(X)
        rule = (lambda X: a.y) if a.y is not None else (lambda X: X ** a.alpha)
        w = None if a.kind == "T-sharp" else parse_weight(a.phi)
        eigen = None
        if a.kind != "S":
            eigen = run.eigen(max(_eigen_limit_for(a.kind, rule(X), w) for X in grid))
        discs = run.discs(max(grid), a.family)
        reports = [moment(a.kind, X, rule(X), a.m, eigen, w, a.family, discs, a.threads) for X in grid]
        rows = [_moment_row(run, r) for r in reports]
        pairs = [(r.X, r.ratio) for r in reports]
        run.extra_output(_plot_path(run, ".ratio.dat"), _two_column(pairs))
        run.emit(MOMENT_COLUMNS, rows)
    elif a.target == "pf":
        grid = _floats(a.y_grid or "")
        if not grid:
            raise UsageError("scan --target pf needs --y-grid")
        beta = _beta(a)
        w = parse_weight(a.phi)
        eigen = run.eigen(max(support_range(Y ** b, w)[1] for Y in grid for b in beta))
        rows = []
        for Y in grid:
            P = pf_bruteforce(beta, Y, eigen, w, False, a.budget)
            Pp = pf_bruteforce(beta, Y, eigen, w, True, a.budget)
            env = pf_envelope(beta, Y)
            rows.append({"Y": Y, "m": len(beta), "P": P, "P_plus": Pp, "envelope": env, "ratio": P / env})
        run.extra_output(_plot_path(run, ".ratio.dat"), _two_column((r["Y"], r["ratio"]) for r in rows))
        run.emit(["Y", "m", "P", "P_plus", "envelope", "ratio"], rows)
    else:  # region3
        grid = _floats(a.b_grid or "")
        if not grid:
            raise UsageError("scan --target region3 needs --b-grid")
        m = a.m if a.m is not None else 4
        table = region3_scaling(m, a.x, grid, a.samples, a.seed)
        rows = [{"B": r.B, "estimate": r.estimate, "stderr": r.stderr, "envelope": r.envelope,
                 "ratio": r.ratio} for r in table]
        run.extra_output(_plot_path(run, ".ratio.dat"), _two_column((r.B, r.ratio) for r in table))
        run.emit(["B", "estimate", "stderr", "envelope", "ratio"], rows)


# -- parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--csv", default=None, help="CSV output path (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--record-timing", action="store_true",
                        help="fill the seconds column (breaks byte-reproducibility)")

    p = _Parser(prog="twistlab", description="Moments of quadratic twists: desk-scale experiments.")
    p.add_argument("--version", action="version", version=f"twistlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help):
        s = sub.add_parser(name, parents=[common], help=help)
        s.set_defaults(func=func)
        return s

    def family(s):
        s.add_argument("--family", choices=FAMILIES, default="fundamental")
        s.add_argument("--odd-squarefree", dest="family", action="store_const", const="odd-squarefree")

    s = add("eigenvalues", cmd_eigenvalues, "tabulate tau(n) and lambda(n)")
    s.add_argument("--limit", type=_num, required=True)
    s.add_argument("--out", default=None, help="also write the plain-text table here")

    s = add("sieve", cmd_sieve, "list discriminants up to X")
    s.add_argument("--x", type=_num, required=True)
    s.add_argument("--out", default=None)
    family(s)

    s = add("char-average", cmd_char_average, "sum of chi_d(n) over the family")
    s.add_argument("--n", required=True, help="comma-separated list")
    s.add_argument("--x", type=_num, required=True)
    family(s)

    s = add("moments", cmd_moments, "one moment value")
    s.add_argument("--kind", choices=KINDS, default="T")
    s.add_argument("--m", type=float, required=True)
    s.add_argument("--x", type=_num, required=True)
    s.add_argument("--y", type=_num, required=True)
    s.add_argument("--phi", default="bump:1,2")
    family(s)

    s = add("holder", cmd_holder, "check the Hoelder inequality")
    s.add_argument("--m", type=int, default=4)
    s.add_argument("--x", type=_num, required=True)
    s.add_argument("--y", type=_num, required=True)
    s.add_argument("--eps", default="0.2,0.3,0.5")
    s.add_argument("--phi", default="bump:1,2")
    family(s)

    s = add("verify-euler", cmd_verify_euler, "check the local Euler factorization")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--pmax", type=int, required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--plus", action="store_true")

    s = add("pf", cmd_pf, "square-product sum by enumeration")
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--beta", default=None)
    s.add_argument("--y", type=_num, required=True)
    s.add_argument("--plus", action="store_true")
    s.add_argument("--phi", default="bump:1,2")
    s.add_argument("--budget", type=int, default=10_000_000)

    s = add("kernels", cmd_kernels, "Monte-Carlo region integral")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--k", type=int, required=True, choices=(1, 2, 3))
    s.add_argument("--x", type=_num, required=True)
    s.add_argument("--b", type=_num, default=10.0)
    s.add_argument("--samples", type=int, default=100_000)

    s = add("scan", cmd_scan, "grid runs with plot-ready output")
    s.add_argument("--target", choices=("moments", "pf", "region3"), default="moments")
    s.add_argument("--kind", choices=KINDS, default="T")
    s.add_argument("--m", type=float, default=None)
    s.add_argument("--x-grid", default=None)
    s.add_argument("--alpha", type=float, default=0.4, help="Y = X^alpha unless --y is given")
    s.add_argument("--y", type=_num, default=None)
    s.add_argument("--y-grid", default=None)
    s.add_argument("--beta", default=None)
    s.add_argument("--x", type=_num, default=1e6)
    s.add_argument("--b-grid", default=None)
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--phi", default="bump:1,2")
    s.add_argument("--budget", type=int, default=10_000_000)
    family(s)
    return p


def _validate(args) -> None:
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    if args.seed < 0:
        raise UsageError("--seed must be >= 0")
    for name in ("x", "y", "limit", "samples", "pmax", "degree"):
        v = getattr(args, name, None)
        if v is not None and v <= 0:
            raise UsageError(f"--{name} must be positive")
    if args.command == "scan" and args.target != "region3" and args.m is None:
        if args.target == "moments" or not args.beta:
            raise UsageError("scan needs --m")
    if args.command == "scan" and args.target == "pf" and args.m is not None:
        args.m = int(args.m)


def _error_record(exc: Exception, kind: str) -> str:
    rec = {"error": kind, "message": str(exc)}
    for key in ("needed", "have", "budget", "visited", "partial", "estimate"):
        if hasattr(exc, key):
            v = getattr(exc, key)
            rec[key] = v if isinstance(v, (int, float)) else str(v)
    return json.dumps(rec, sort_keys=True)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
        args.func(Run(args))
    except UsageError as exc:
        print(_error_record(exc, exc.kind), file=sys.stderr)
        return 2
    except TwistlabError as exc:
        print(_error_record(exc, exc.kind), file=sys.stderr)
        return 3
    except ValueError as exc:
        # parameter validation inside the library
        print(_error_record(exc, "usage"), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
