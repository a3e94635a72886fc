"""Command-line front end.

Every subcommand writes machine-readable output to stdout, prefixed by a
``#`` header that records the tool version and the fully resolved options, so
an output file can be regenerated from its own contents.  Output is assembled
in memory and written only on success.

Exit codes: 0 success, 1 data or numeric error, 2 usage error.
"""

from __future__ import annotations

import argparse
import ast
import hashlib
import io
import json
import math
import operator
import os
import sys
from typing import Any, Callable, Sequence

from . import __version__
from .analysis import (
    DEFAULT_EPSILON,
    DEFAULT_Q,
    GrowthThresholds,
    estimate_r,
    scan_levels,
)
from .cutoff import CutoffFunction, constants_c, load_tabulated_cutoff, standard_bump
from .errors import ResonanceError
from .ingest import load_coefficients, x_grid
from .oscillatory import PhaseSpec, p_bound, p_integral, q_floor
from .resonance import resonance_curve, resonance_sum
from .voronoi import NORMALIZATIONS, dual_expansion


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# alpha expressions

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {"sqrt": math.sqrt, "exp": math.exp, "log": math.log}
_CONSTS = {"pi": math.pi, "e": math.e}


def compile_alpha(expr: str) -> Callable[[float], float]:
    """Turn an arithmetic expression in X (e.g. ``2*sqrt(1/5)``) into a function.

    Only numbers, X, pi, e, + - * / **, and sqrt/exp/log are accepted.
    """
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError:
        raise UsageError(f"--alpha: cannot parse {expr!r}") from None

    def ev(node, X):
        if isinstance(node, ast.Expression):
            return ev(node.body, X)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id == "X":
                return X
            if node.id in _CONSTS:
                return _CONSTS[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left, X), ev(node.right, X))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand, X))
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
            and not node.keywords
        ):
            return _FUNCS[node.func.id](ev(node.args[0], X))
        raise UsageError(f"--alpha: unsupported element in {expr!r}")

    ev(tree, 1000.0)  # validate once up front
    return lambda X: float(ev(tree, float(X)))


# --------------------------------------------------------------------------
# output


def fmt(x: Any) -> str:
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


class Output:
    """Buffered table output in CSV or JSON with a metadata header."""

    def __init__(self, fmt_name: str, meta: dict, columns: Sequence[str]):
        self.format = fmt_name
        self.meta = meta
        self.columns = list(columns)
        self.rows: list[list[Any]] = []

    def add(self, *row):
        if len(row) != len(self.columns):
            raise AssertionError("row length mismatch")
        self.rows.append(list(row))

    def render(self) -> str:
        if self.format == "json":
            doc = {
                "meta": self.meta,
                "columns": self.columns,
                "rows": [[_jsonable(v) for v in row] for row in self.rows],
            }
            return json.dumps(doc, indent=1, sort_keys=True) + "\n"
        buf = io.StringIO()
        for key in sorted(self.meta):
            buf.write(f"# {key}: {_header_value(self.meta[key])}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(fmt(v) for v in row) + "\n")
        return buf.getvalue()


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def _header_value(v) -> str:
    if isinstance(v, float):
        return fmt(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_header_value(x) for x in v) + "]"
    return str(v)


# --------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser, coeffs: bool = True, grid: bool = True):
    p.add_argument("--config", help="file of 'key = value' lines; command-line flags take precedence")
    p.add_argument("--output-format", choices=("csv", "json"), default="csv")
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance")
    p.add_argument("--cutoff", choices=("bump",), default="bump")
    p.add_argument("--cutoff-table", help="CSV of t,phi(t) samples replacing the standard bump")
    p.add_argument("--threads", type=int, default=None, help="worker threads (capped by RESONANCE_THREADS)")
    if coeffs:
        p.add_argument("--coeffs", help="coefficient table (CSV or JSON)")
        p.add_argument("--format", choices=("csv", "json"), default=None, help="coefficient file format")
    if grid:
        p.add_argument("--x-min", type=float, default=1000.0)
        p.add_argument("--x-max", type=float, default=2200.0)
        p.add_argument("--x-steps", type=int, default=13)
        g = p.add_mutually_exclusive_group()
        g.add_argument("--geometric", dest="geometric", action="store_true", default=True)
        g.add_argument("--arithmetic", dest="geometric", action="store_false")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maass-resonance",
        description="Resonance sums of Maass form coefficients: level and spectral parameter recovery.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="resonance sum over an X grid (X,re,im,abs)")
    _common(p)
    p.add_argument("--alpha", help="alpha, an expression that may use X")
    p.add_argument("--beta", type=float, default=0.5)

    p = sub.add_parser("scan-level", help="two-curve level test for a range of c")
    _common(p)
    p.add_argument("--c-min", type=int, default=1)
    p.add_argument("--c-max", type=int, default=10)
    p.add_argument("--q", type=int, default=DEFAULT_Q)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--main-term-tol", type=float, default=GrowthThresholds.main_term_tol)
    p.add_argument("--decay-slope-max", type=float, default=GrowthThresholds.decay_slope_max)
    p.add_argument("--decay-floor", type=float, default=GrowthThresholds.decay_floor)

    p = sub.add_parser("estimate-r", help="spectral parameter from resonance sums at q = 1")
    _common(p)
    p.add_argument("--level", type=int)
    p.add_argument("--normalization", choices=sorted(NORMALIZATIONS), default="bessel")

    p = sub.add_parser("verify", help="compare resonance sums with the dual expansion")
    _common(p)
    p.add_argument("--level", type=int)
    p.add_argument("--r", type=float, help="spectral parameter")
    p.add_argument("--alpha", help="alpha, an expression that may use X")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--N", "--order", dest="N", type=int, default=1, help="number of asymptotic terms")
    p.add_argument("--x", dest="x_single", type=float, default=None, help="single X instead of a grid")
    p.add_argument("--normalization", choices=sorted(NORMALIZATIONS), default="bessel")

    p = sub.add_parser("moments", help="cutoff moments and main-term constants")
    _common(p, coeffs=False, grid=False)
    p.add_argument("--k-max", type=int, default=0)

    p = sub.add_parser("p-integral", help="one oscillatory integral")
    _common(p, coeffs=False, grid=False)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--X", type=float)
    p.add_argument("--w", type=float, default=0.0)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--sign", choices=("plus", "minus"), default="plus")
    p.add_argument("--level", type=int, default=None, help="with --n, also report Q for dual index n")
    p.add_argument("--n", type=int, default=None)
    return parser


REQUIRED = {
    "curve": ("coeffs", "alpha"),
    "scan-level": ("coeffs",),
    "estimate-r": ("coeffs", "level"),
    "verify": ("coeffs", "level", "r", "alpha"),
    "moments": (),
    "p-integral": ("alpha", "X"),
}


def read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"--config: line {lineno} is not 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace, argv: Sequence[str]) -> argparse.Namespace:
    """Re-parse with config-file values installed as defaults."""
    config = read_config(args.config)
    subparser = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    actions = {a.dest: a for a in subparser._actions}  # noqa: SLF001
    defaults = {}
    for key, raw in config.items():
        action = actions.get(key)
        if action is None or key in ("config", "help"):
            raise UsageError(f"--config: unknown key {key!r} for {args.command}")
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):  # noqa: SLF001
            if key == "geometric":
                defaults[key] = raw.lower() in ("1", "true", "yes")
            continue
        try:
            value = action.type(raw) if action.type else raw
        except ValueError:
            raise UsageError(f"--config: bad value for {key}: {raw!r}") from None
        if action.choices and value not in action.choices:
            raise UsageError(f"--config: {key} must be one of {list(action.choices)}")
        defaults[key] = value
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _workers(args) -> int:
    n = args.threads if args.threads is not None else (os.cpu_count() or 1)
    cap = os.environ.get("RESONANCE_THREADS")
    if cap:
        try:
            n = min(n, int(cap))
        except ValueError:
            raise UsageError(f"RESONANCE_THREADS must be an integer, got {cap!r}") from None
    return max(1, n)


def _cutoff(args) -> CutoffFunction:
    if args.cutoff_table:
        return load_tabulated_cutoff(args.cutoff_table)
    return standard_bump()


def _file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _meta(args, phi: CutoffFunction) -> dict:
    meta = {"tool": f"maass-resonance {__version__}", "command": args.command, "phi": phi.name}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "threads", "config"):
            continue  # do not affect the numbers
        if value is not None:
            meta[key] = value
    if getattr(args, "coeffs", None):
        meta["coeffs_sha256"] = _file_digest(args.coeffs)
    if getattr(args, "cutoff_table", None):
        meta["cutoff_table_sha256"] = _file_digest(args.cutoff_table)
    return meta


def _grid(args) -> tuple[float, ...]:
    try:
        return x_grid(args.x_min, args.x_max, args.x_steps, args.geometric)
    except ValueError as exc:
        raise UsageError(f"--x-min/--x-max/--x-steps: {exc}") from None


# --------------------------------------------------------------------------
# subcommands


def cmd_curve(args, phi, out_meta) -> Output:
    table = load_coefficients(args.coeffs, args.format)
    rule = compile_alpha(args.alpha)
    curve = resonance_curve(table, phi, rule, args.beta, _grid(args), _workers(args), label=args.alpha)
    out = Output(args.output_format, out_meta, ["X", "re", "im", "abs"])
    for pt in curve.points:
        out.add(pt.X, pt.value.real, pt.value.imag, pt.abs)
    return out


def cmd_scan_level(args, phi, out_meta) -> Output:
    if args.c_min < 1 or args.c_max < args.c_min:
        raise UsageError("--c-min/--c-max: need 1 <= c-min <= c-max")
    if args.q < 1:
        raise UsageError("--q must be >= 1")
    if not 0 < args.epsilon < 1:
        raise UsageError("--epsilon must lie in (0, 1)")
    table = load_coefficients(args.coeffs, args.format)
    th = GrowthThresholds(args.main_term_tol, args.decay_slope_max, args.decay_floor)
    rows = scan_levels(
        table, phi, range(args.c_min, args.c_max + 1), args.q, args.epsilon, _grid(args), th, _workers(args)
    )
    cols = ["c", "slopeA", "classA", "slopeB", "classB", "admitted", "lower", "upper", "resolved", "error"]
    out = Output(args.output_format, out_meta, cols)
    for row in rows:
        a, b, br = row.curve_a, row.curve_b, row.bracket
        out.add(
            row.c,
            a.slope if a else None,
            a.klass if a else None,
            b.slope if b else None,
            b.klass if b else None,
            row.admitted,
            br.lower if br else None,
            br.upper if br else None,
            br.resolved if br else None,
            row.error,
        )
    return out


def cmd_estimate_r(args, phi, out_meta) -> Output:
    table = load_coefficients(args.coeffs, args.format)
    est = estimate_r(table, args.level, phi, _grid(args), normalization=args.normalization)
    out_meta = dict(out_meta)
    out_meta["c_plus"] = [est.c_plus.real, est.c_plus.imag]
    out_meta["c_minus"] = [est.c_minus.real, est.c_minus.imag]
    out = Output(args.output_format, out_meta, ["X", "r_literal", "r_corrected", "guard"])
    for pt in est.per_X:
        out.add(pt.X, pt.r_literal, pt.r_corrected, pt.r_corrected**4 * args.level / pt.X)
    return out


def cmd_verify(args, phi, out_meta) -> Output:
    if args.N < 1:
        raise UsageError("--N must be >= 1")
    table = load_coefficients(args.coeffs, args.format)
    rule = compile_alpha(args.alpha)
    cols = ["X", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_diff", "budget", "n_dual", "guard"]
    out = Output(args.output_format, out_meta, cols)
    xs = (args.x_single,) if args.x_single is not None else _grid(args)
    for X in xs:
        alpha = rule(X)
        lhs = resonance_sum(table, phi, alpha, args.beta, X)
        rhs = dual_expansion(table, args.level, args.r, (alpha, args.beta, X), args.N, phi, args.tol, args.normalization)
        out.add(X, lhs.real, lhs.imag, rhs.value.real, rhs.value.imag, abs(lhs - rhs.value), rhs.error_budget, rhs.n_cutoff, rhs.guard)
    return out


def cmd_moments(args, phi, out_meta) -> Output:
    if args.k_max < 0:
        raise UsageError("--k-max must be >= 0")
    ms = constants_c(phi, min(args.tol, 1e-12), args.k_max + 1)
    out_meta = dict(out_meta)
    out_meta["c_plus"] = [ms.c_plus.real, ms.c_plus.imag]
    out_meta["c_minus"] = [ms.c_minus.real, ms.c_minus.imag]
    out = Output(args.output_format, out_meta, ["k", "m_plus", "m_minus"])
    for k in range(ms.n_terms):
        out.add(k, ms.plus[k], ms.minus[k])
    return out


def cmd_p_integral(args, phi, out_meta) -> Output:
    try:
        spec = PhaseSpec(args.alpha, args.beta, args.X, args.w)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.k < 0:
        raise UsageError("--k must be >= 0")
    if (args.level is None) != (args.n is None):
        raise UsageError("--level and --n must be given together")
    res = p_integral(spec, args.sign, args.k, phi, args.tol)
    Q = res.q_floor if args.level is None else q_floor(spec, args.n, args.level)
    bound = p_bound(spec, Q) if Q > 0 else None
    cols = ["re", "im", "est_abs_error", "Q", "bound_heuristic", "panels"]
    row = [res.value.real, res.value.imag, res.est_abs_error, Q, bound, res.panels_used]
    out = Output(args.output_format, out_meta, cols)
    out.add(*row)
    return out


COMMANDS = {
    "curve": cmd_curve,
    "scan-level": cmd_scan_level,
    "estimate-r": cmd_estimate_r,
    "verify": cmd_verify,
    "moments": cmd_moments,
    "p-integral": cmd_p_integral,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse has already printed the message
        return int(exc.code or 0)

    try:
        if args.config:
            args = _apply_config(parser, args, argv)
        missing = [k for k in REQUIRED[args.command] if getattr(args, k, None) is None]
        if missing:
            raise UsageError("missing required option(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))
        phi = _cutoff(args)
        out = COMMANDS[args.command](args, phi, _meta(args, phi))
        text = out.render()
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=stderr)
        return 2
    except ResonanceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    stdout.write(text)
    stdout.flush()
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
