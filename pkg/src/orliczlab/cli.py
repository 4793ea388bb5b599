"""Command-line front end: ``orliczlab <subcommand> [options]``.

Options may also come from a JSON file given with ``--config``; flags on
the command line override it.  Tables go to stdout as CSV and, when an
output path is known (``--output`` or the ``ORLICZLAB_OUTPUT_DIR``
directory), are written atomically as CSV or JSON.

Exit codes: 0 success, 1 usage or invalid parameters, 2 numeric failure,
3 a checked expectation was violated, 4 an inconclusive verdict under
``--strict``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .analysis import GridFunction, lebesgue_norm, luxemburg_norm, modular, sobolev_norm
from .conditions import (FAILS, INCONCLUSIVE, A1SearchSpec, Sampling, check_a0, check_a1,
                         check_a1s, check_aDec, check_aInc)
from .dp1d import (FIGURE_C_VALUES, DPParams, caccioppoli_experiment, hat_function,
                   limiting_exponent, p_laplace_nonintegrability, sharpness_sweep,
                   solution_envelope, solve_double_phase_1d, verify_supersolution)
from .errors import NoConvergence, OrliczLabError
from .extended import INF, parse_extended
from .phi import (Ball, Coefficient, DoublePhase, GrowthField, PhiFunction, Power,
                  PowerLog, psi_r)
from .table import ExperimentTable, format_number

OUTPUT_DIR_ENV = "ORLICZLAB_OUTPUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_ASSERT, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class ExpectationFailed(Exception):
    pass


# --------------------------------------------------------------------------
# value parsing


def float_list(text) -> List[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    parts = str(text).strip().strip("()[]").split(",")
    try:
        return [float(p) for p in parts if p.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def extended_value(text):
    try:
        return parse_extended(text)
    except (TypeError, ValueError):
        raise UsageError(f"expected a number or 'inf', got {text!r}") from None


def _arity(name, args, n):
    if len(args) != n:
        raise UsageError(f"{name} takes {n} parameter(s), got {len(args)}")


def parse_phi(text: str) -> PhiFunction:
    """``power:p``, ``double-phase:p,q,alpha``, ``double-phase-max:p,q,alpha``,
    ``double-phase-abs:p,q,alpha`` or ``powerlog:p``.

    The double phase coefficient is ``max{-x,0}^alpha`` except for the
    ``-abs`` variant, which uses ``|x|^alpha``.
    """
    kind, _, rest = str(text).partition(":")
    args = float_list(rest) if rest else []
    if kind == "power":
        _arity(kind, args, 1)
        return Power(args[0])
    if kind in ("double-phase", "double-phase-max", "double-phase-abs"):
        _arity(kind, args, 3)
        p, q, alpha = args
        coef = Coefficient.abs_power(alpha) if kind.endswith("abs") else Coefficient.degenerate(alpha)
        return DoublePhase(p, q, coef, form="max" if kind.endswith("max") else "sum")
    if kind == "powerlog":
        _arity(kind, args, 1)
        return PowerLog(args[0], declared_exponents=(args[0], args[0] + 1.0))
    raise UsageError(f"unknown Phi-function family {kind!r}")


def parse_u(text: str) -> Callable:
    """``const:c``, ``linear:a,b`` (a x + b) or ``poly:c0,c1,...`` (c0 + c1 x + ...)."""
    kind, _, rest = str(text).partition(":")
    args = float_list(rest) if rest else []
    if kind == "const":
        _arity(kind, args, 1)
        return lambda x: np.full_like(x, args[0])
    if kind == "linear":
        _arity(kind, args, 2)
        return lambda x: args[0] * x + args[1]
    if kind == "poly":
        if not args:
            raise UsageError("poly needs at least one coefficient")
        return lambda x: np.polynomial.polynomial.polyval(x, args)
    raise UsageError(f"unknown function spec {kind!r}")


def interval(text) -> tuple:
    v = float_list(text)
    if len(v) != 2 or not v[0] < v[1]:
        raise UsageError(f"expected an interval lo,hi with lo < hi, got {text!r}")
    return v[0], v[1]


def x0_sequence(args) -> List[float]:
    if args.x0_list is not None:
        return float_list(args.x0_list)
    lo, hi = [int(v) for v in float_list(args.m_range)]
    return [10.0 ** -m for m in range(lo, hi + 1)]


# --------------------------------------------------------------------------
# output


def emit_table(table: ExperimentTable, args, suffix: str = "", out=None):
    out = out or sys.stdout
    table.metadata.setdefault("tool_version", __version__)
    table.metadata.setdefault("subcommand", args.command)
    out.write(table.to_csv() if args.format == "csv" else table.to_json())
    path = output_path(args, suffix)
    if path is not None:
        table.write(path, args.format)


def output_path(args, suffix: str = "") -> Optional[Path]:
    """``--output`` (with ``_suffix`` before the extension) or the env directory."""
    tail = f"_{suffix}" if suffix else ""
    if args.output:
        base = Path(args.output)
        return base.with_name(f"{base.stem}{tail}{base.suffix}") if tail else base
    directory = os.environ.get(OUTPUT_DIR_ENV)
    if directory:
        return Path(directory) / f"{args.command}{tail}.{args.format}"
    return None


def emit_scalar(value, args, name: str):
    text = "inf" if value is INF else format_number(float(value))
    print(text)
    path = output_path(args)
    if path is not None:
        table = ExperimentTable([name], [[text if value is INF else float(value)]],
                                {"tool_version": __version__, "subcommand": args.command})
        table.write(path, args.format)


# --------------------------------------------------------------------------
# subcommands


def cmd_reproduce_figure(args) -> int:
    cs = float_list(args.c_list)
    lo, hi = interval(args.domain)
    params = [DPParams(args.p, args.q, args.alpha, c, x_left=lo, x_right=hi) for c in cs]
    curves = ExperimentTable(["c", "x", "u"])
    summary = ExperimentTable(["c", "x0", "u_at_minus_x0", "u_right"])
    xs = np.linspace(lo, hi, args.nodes)
    for P in params:
        sol = solve_double_phase_1d(P)
        for x, u in zip(xs, sol.u(xs)):
            curves.append([P.c, float(x), float(u)])
        kink = float(sol.u(-sol.x0)) if sol.degenerate_present else float("nan")
        summary.append([P.c, sol.x0, kink, float(sol.u(hi))])
    meta = dict(p=args.p, q=args.q, alpha=args.alpha, domain=[lo, hi], nodes=args.nodes)
    curves.metadata.update(meta)
    summary.metadata.update(meta)
    bad = []
    if not args.no_range_check:
        r_lo, r_hi = interval(args.range)
        bad = [c for c, u in zip(cs, summary.column("u_right")) if not r_lo <= u <= r_hi]
    if bad:
        sys.stdout.write(summary.to_csv())
        raise ExpectationFailed(f"u({hi:g}) outside [{r_lo:g}, {r_hi:g}] for c in {bad}")
    path = output_path(args, "curves")
    if path is not None:
        curves.write(path, args.format)
    emit_table(summary, args)
    return EXIT_OK


def cmd_check_conditions(args) -> int:
    phi = parse_phi(args.phi)
    lo, hi = interval(args.x_range)
    sampling = Sampling(lo, hi)
    spec = A1SearchSpec.dyadic(center=args.center)
    p, q = phi.declared_exponents
    reports = [(None, check_a0(phi, sampling)), (None, check_aInc(phi, p, sampling)),
               (None, check_aDec(phi, q, sampling)), (None, check_a1(phi, spec))]
    for s in float_list(args.s):
        reports.append((s, check_a1s(phi, s, spec)))
    table = ExperimentTable(["condition", "s", "verdict", "witness_beta", "witness_L", "margin"])
    for s, rep in reports:
        table.append([rep.condition, "" if s is None else s, rep.verdict,
                      "" if rep.witness_beta is None else rep.witness_beta,
                      "" if rep.witness_L is None else rep.witness_L, rep.margin])
    table.metadata.update(phi=args.phi, x_range=[lo, hi], center=args.center)
    emit_table(table, args)
    verdicts = [rep.verdict for _, rep in reports]
    if args.expect_holds and FAILS in verdicts:
        return EXIT_ASSERT
    if args.strict and INCONCLUSIVE in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _sweep_table(p, q, alpha, s, x0s, args) -> ExperimentTable:
    return sharpness_sweep(p, q, alpha, s, x0s, node_count=args.nodes, ell0=args.ell0)


def cmd_sharpness_sweep(args) -> int:
    s = extended_value(args.s)
    table = _sweep_table(args.p, args.q, args.alpha, s, x0_sequence(args), args)
    emit_table(table, args)
    print(f"# classification: {table.metadata['classification']}", file=sys.stderr)
    return EXIT_OK


def cmd_harnack_sweep(args) -> int:
    s = extended_value(args.s)
    x0s = x0_sequence(args)
    out = None
    for alpha in float_list(args.alpha_list):
        t = _sweep_table(args.p, args.q, alpha, s, x0s, args)
        if out is None:
            out = ExperimentTable(["alpha"] + t.columns + ["classification"],
                                  metadata={"p": args.p, "q": args.q, "s": str(s),
                                            "threshold": (1 + (0 if s is INF else 1 / s))
                                            * (args.q - args.p)})
        for row in t.rows:
            out.append([alpha] + row + [t.metadata["classification"]])
    emit_table(out, args)
    return EXIT_OK


def cmd_caccioppoli(args) -> int:
    center, radius = float_list(args.ball)
    ball = Ball(center, radius)
    results = []
    for nodes in (args.nodes, 2 * args.nodes - 1):
        res, u = caccioppoli_experiment(args.c_low, args.c_high, args.x_cross, ball, nodes,
                                        args.ell, args.sigma, args.p, args.q, args.alpha)
        results.append(res)
    change = abs(results[1].ratio / results[0].ratio - 1.0) if results[0].ratio else 0.0
    first = solve_double_phase_1d(DPParams(args.p, args.q, args.alpha, args.c_low))
    second = solve_double_phase_1d(DPParams(args.p, args.q, args.alpha, args.c_high))
    lo, hi = ball.interval
    env = solution_envelope(first, second, args.x_cross, lo, hi, args.nodes, "min")
    field = GrowthField.canonical(first.params.phi)
    residuals = []
    for k in range(args.hats):
        frac = (k + 0.5) / args.hats
        a, b = lo + 0.45 * frac * (hi - lo), hi - 0.45 * (1 - frac) * (hi - lo)
        peak = 0.5 * (a + b)
        residuals.append(verify_supersolution(field, env, hat_function(env, a, peak, b)))
    table = ExperimentTable(["nodes", "lhs", "rhs_integral", "ratio", "prefactor"])
    for nodes, res in zip((args.nodes, 2 * args.nodes - 1), results):
        table.append([nodes, res.lhs, res.rhs_integral, res.ratio, res.prefactor])
    table.metadata.update(ratio_change=change, min_residual=min(residuals),
                          c_low=args.c_low, c_high=args.c_high, ell=args.ell, sigma=args.sigma)
    emit_table(table, args)
    print(f"# ratio change {format_number(change)}; min residual "
          f"{format_number(min(residuals))}", file=sys.stderr)
    if not math.isfinite(results[0].ratio):
        raise NoConvergence("Caccioppoli ratio is not finite")
    if args.check and (change > 0.02 or min(residuals) < -1e-8):
        raise ExpectationFailed("Caccioppoli stability or supersolution check failed")
    return EXIT_OK


def cmd_norm(args) -> int:
    phi = parse_phi(args.phi)
    lo, hi = interval(args.interval)
    u = GridFunction.from_function(parse_u(args.u), lo, hi, args.nodes)
    if args.kind == "luxemburg":
        value = luxemburg_norm(phi, u)
    elif args.kind == "modular":
        value = modular(phi, u)
    elif args.kind == "sobolev":
        value = sobolev_norm(phi, u)
    else:
        value = lebesgue_norm(u, extended_value(args.s))
    emit_scalar(value, args, args.kind)
    return EXIT_OK


def cmd_psi(args) -> int:
    phi = parse_phi(args.phi)
    lo, hi = interval(args.ball)
    value = psi_r(phi, Ball.from_interval(lo, hi), args.t, p=args.p_exp)
    emit_scalar(value, args, "psi_r")
    return EXIT_OK


def cmd_ell(args) -> int:
    emit_scalar(limiting_exponent(args.p, args.n), args, "ell")
    return EXIT_OK


def cmd_nonintegrability(args) -> int:
    eps = float_list(args.eps_list) if args.eps_list else \
        [10.0 ** -k for k in range(1, args.decades + 1)]
    limit = limiting_exponent(args.p, args.n)
    ell = None if limit is INF else args.ell_factor * limit
    rep = p_laplace_nonintegrability(args.p, args.n, eps, ell)
    if rep.branch == "infinite":
        table = ExperimentTable(["eps", "sup_value"], [[e, v] for e, v in zip(eps, rep.sup_values)])
    else:
        table = ExperimentTable(["eps", "integral", "slope", "difference"])
        for i, e in enumerate(eps):
            slope = rep.slopes[i - 1] if i else float("nan")
            diff = rep.differences[i - 1] if i else float("nan")
            table.append([e, rep.integrals[i], slope, diff])
    table.metadata.update(p=args.p, n=args.n, ell=str(rep.ell), branch=rep.branch)
    emit_table(table, args)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _common(sp):
    sp.add_argument("--config", help="JSON file with option values (flags override)")
    sp.add_argument("--output", help="output file (default: $%s/<subcommand>.<format>)"
                    % OUTPUT_DIR_ENV)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")


def _dp(sp, alpha=True):
    sp.add_argument("--p", type=float, default=1.1)
    sp.add_argument("--q", type=float, default=2.0)
    if alpha:
        sp.add_argument("--alpha", type=float, default=0.5)


def _sweep(sp):
    sp.add_argument("--s", default="2", help="Lebesgue exponent, or 'inf'")
    sp.add_argument("--x0-list", default=None)
    sp.add_argument("--m-range", default="2,8", help="x0 = 10^-m for m in this range")
    sp.add_argument("--nodes", type=int, default=4001)
    sp.add_argument("--ell0", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orliczlab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("reproduce-figure", help="solution curves for several flux levels c")
    _common(sp)
    _dp(sp)
    sp.add_argument("--c-list", default=",".join(str(c) for c in FIGURE_C_VALUES))
    sp.add_argument("--domain", default="-1,1")
    sp.add_argument("--nodes", type=int, default=401)
    sp.add_argument("--range", default="2,32", help="expected range of u at the right end")
    sp.add_argument("--no-range-check", action="store_true")
    sp.set_defaults(func=cmd_reproduce_figure)

    sp = sub.add_parser("check-conditions", help="run all condition checkers on a family")
    _common(sp)
    sp.add_argument("--phi", default="double-phase:1.1,2,0.5")
    sp.add_argument("--s", default="2", help="comma-separated exponents for (A1-s)")
    sp.add_argument("--x-range", default="-1,1")
    sp.add_argument("--center", type=float, default=0.0, help="center of the dyadic balls")
    sp.add_argument("--expect-holds", action="store_true")
    sp.add_argument("--strict", action="store_true")
    sp.set_defaults(func=cmd_check_conditions)

    sp = sub.add_parser("harnack-sweep", help="counterexample sweep over several alpha")
    _common(sp)
    _dp(sp, alpha=False)
    sp.add_argument("--alpha-list", default="0.3,0.6,0.9,1.2,1.35,1.5")
    _sweep(sp)
    sp.set_defaults(func=cmd_harnack_sweep)

    sp = sub.add_parser("sharpness-sweep", help="counterexample sweep for one alpha")
    _common(sp)
    _dp(sp)
    _sweep(sp)
    sp.set_defaults(func=cmd_sharpness_sweep)

    sp = sub.add_parser("caccioppoli", help="Caccioppoli ratio for a min of two solutions")
    _common(sp)
    _dp(sp)
    sp.add_argument("--c-low", type=float, default=1.1)
    sp.add_argument("--c-high", type=float, default=1.3)
    sp.add_argument("--x-cross", type=float, default=-0.5)
    sp.add_argument("--ball", default="-0.5,0.4", help="center,radius")
    sp.add_argument("--nodes", type=int, default=4001)
    sp.add_argument("--ell", type=float, default=1.0)
    sp.add_argument("--sigma", type=float, default=0.5)
    sp.add_argument("--hats", type=int, default=20)
    sp.add_argument("--check", action="store_true")
    sp.set_defaults(func=cmd_caccioppoli)

    sp = sub.add_parser("norm", help="modular or norm of a grid function")
    _common(sp)
    sp.add_argument("--phi", default="power:2")
    sp.add_argument("--u", default="const:1")
    sp.add_argument("--interval", default="0,1")
    sp.add_argument("--nodes", type=int, default=1001)
    sp.add_argument("--kind", choices=("luxemburg", "modular", "sobolev", "lebesgue"),
                    default="luxemburg")
    sp.add_argument("--s", default="2", help="exponent for --kind lebesgue")
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("psi", help="the auxiliary x-free function on a ball")
    _common(sp)
    sp.add_argument("--phi", default="double-phase:1.1,2,0.5")
    sp.add_argument("--ball", default="0.1,0.9", help="interval lo,hi")
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--p", dest="p_exp", type=float, default=None,
                    help="(aInc) exponent (default: the family's lower exponent)")
    sp.set_defaults(func=cmd_psi)

    sp = sub.add_parser("ell", help="limiting integrability exponent")
    _common(sp)
    sp.add_argument("--p", type=float, required=False, default=2.0)
    sp.add_argument("--n", type=int, default=3)
    sp.set_defaults(func=cmd_ell)

    sp = sub.add_parser("nonintegrability", help="partial integrals of the radial example")
    _common(sp)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--eps-list", default=None)
    sp.add_argument("--decades", type=int, default=8)
    sp.add_argument("--ell-factor", type=float, default=1.0)
    sp.set_defaults(func=cmd_nonintegrability)
    return parser


def _load_config(argv: Sequence[str]) -> Dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        with open(known.config) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        config = _load_config(argv)
        if config:
            command = next((a for a in argv if not a.startswith("-")), None)
            sub = parser._subparsers._group_actions[0].choices.get(command)
            if sub is None:
                raise UsageError("a subcommand is required")
            known = {a.dest for a in sub._actions}
            unknown = sorted(set(config) - known)
            if unknown:
                raise UsageError(f"unknown config keys: {', '.join(unknown)}")
            sub.set_defaults(**config)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_OK if exc.code == 0 else EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExpectationFailed as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    except (NoConvergence, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OrliczLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
