"""Command-line front end: ``impstop solve|verify|simulate|sweep``.

Exit codes: 0 success, 1 input error, 2 no equilibrium, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys

from .config import ConfigError, dump_config, load_config
from .model import InvalidParams
from .montecarlo import InvalidSimConfig, InvalidStrategy, SimConfig, estimates_to_csv, simulate
from .payoffs import TYPE_I, TYPE_II, PiecewisePayoff
from .scenarios import get_scenario
from .sweep import UnknownParam, field_name, sweep, sweep_to_csv
from .type1 import diagnose_type1
from .type2 import diagnose_type2
from .verifier import DEFAULT_N, GridTooCoarse, default_grid, verify

EXIT_OK, EXIT_INPUT, EXIT_NO_EQ, EXIT_VERIFY = 0, 1, 2, 3

SOLVE_COLUMNS = ("type", "valid", "x1_bar", "x1_star", "x2_bar", "z_tilde", "w",
                 "C11", "C12", "C21", "C22", "failed")
VERIFY_COLUMNS = ("type", "condition", "region", "max_violation", "argmax", "tol", "pass")

log = logging.getLogger("impstop")


class InputError(Exception):
    pass


def g6(x) -> str:
    return f"{x:.6g}"


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--scenario", help="built-in scenario: type1-A, type1-B, type2-A, type2-B")
    src.add_argument("--config", help="key = value parameter file")
    common.add_argument("--out", help="write CSV here (stdout for simulate/sweep if omitted)")
    common.add_argument("--seed", type=int)
    common.add_argument("--paths", type=int, help="number of Monte Carlo paths")
    common.add_argument("--dt", type=float)
    common.add_argument("--grid", type=int, help="verification grid size")
    common.add_argument("--x0", help="comma-separated starting points")
    common.add_argument("--type", choices=(TYPE_I, TYPE_II), dest="eq_type",
                        help="which equilibrium to simulate when both exist")
    common.add_argument("--param")
    common.add_argument("--from", dest="lo", type=float)
    common.add_argument("--to", dest="hi", type=float)
    common.add_argument("--steps", type=int, default=21)
    common.add_argument("--force", action="store_true", help="simulate even if verification fails")
    common.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    common.add_argument("--verbose", "-v", action="store_true")

    ap = argparse.ArgumentParser(prog="impstop", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, hlp in (("solve", "compute Type I and Type II equilibria"),
                      ("verify", "solve, then check every QVI condition on a grid"),
                      ("simulate", "solve, verify and estimate payoffs by Monte Carlo"),
                      ("sweep", "comparative statics over one parameter")):
        sub.add_parser(name, parents=[common], help=hlp)
    return ap


def _resolve(args):
    """Parameters plus run settings; command-line flags override the config file."""
    if args.config:
        try:
            rc = load_config(args.config)
        except OSError as exc:
            raise InputError(f"cannot read config: {exc}") from None
        params, run = rc.params, dict(rc.run)
    elif args.scenario:
        try:
            params = get_scenario(args.scenario).params
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
        run = {}
    else:
        raise InputError("give --scenario NAME or --config FILE")
    for key, val in (("seed", args.seed), ("n_paths", args.paths), ("dt", args.dt), ("grid", args.grid)):
        if val is not None:
            run[key] = val
    return params, run


def _sim_config(run) -> SimConfig:
    kw = {k: run[k] for k in ("dt", "T", "n_paths", "seed", "antithetic", "barrier_shift") if k in run}
    return SimConfig(**kw)


def _solve(params):
    return diagnose_type1(params), diagnose_type2(params)


def _print_solve(params, r1, r2, out=None):
    out = out or sys.stdout
    print(f"theta = {g6(params.theta)}", file=out)
    for label, rep in (("Type I", r1), ("Type II", r2)):
        eq = rep.equilibrium
        if eq is None:
            print(f"{label}: none ({rep.reason})", file=out)
            continue
        x1b, x1s, x2b = eq.x1_bar, eq.x1_star, eq.x2_bar
        print(f"{label}: x1_bar = {g6(x1b)}  x1_star = {g6(x1s)}  x2_bar = {g6(x2b)}", file=out)
        if label == "Type I":
            print(f"  z_tilde = {g6(eq.z_tilde)}  w_tilde = {g6(eq.w_tilde)}", file=out)
        else:
            print(f"  w_hat = {g6(eq.w_hat)}", file=out)
        co = eq.coeffs
        print(f"  C11 = {g6(co.C11)}  C12 = {g6(co.C12)}  C21 = {g6(co.C21)}  C22 = {g6(co.C22)}", file=out)
        print("  conditions: all hold", file=out)


def _solve_csv(r1, r2) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SOLVE_COLUMNS)
    for kind, rep in ((TYPE_I, r1), (TYPE_II, r2)):
        for eq in rep.candidates:
            wv = eq.w_tilde if kind == TYPE_I else eq.w_hat
            z = repr(eq.z_tilde) if kind == TYPE_I else ""
            w.writerow([kind, str(eq.valid).lower(), *(repr(float(t)) for t in (eq.x1_bar, eq.x1_star, eq.x2_bar)), z, repr(wv),
                        *(repr(c) for c in eq.coeffs.as_tuple()), "|".join(eq.conditions.failed())])
    return buf.getvalue()


def _write(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _payoffs(params, r1, r2, which=None):
    found = []
    if r1.equilibrium is not None and which in (None, TYPE_I):
        found.append(PiecewisePayoff.from_type1(r1.equilibrium, params))
    if r2.equilibrium is not None and which in (None, TYPE_II):
        found.append(PiecewisePayoff.from_type2(r2.equilibrium, params))
    return found


def cmd_solve(args, params, run) -> int:
    r1, r2 = _solve(params)
    _print_solve(params, r1, r2)
    if args.out:
        _write(_solve_csv(r1, r2), args.out)
    return EXIT_OK if (r1.equilibrium or r2.equilibrium) else EXIT_NO_EQ


def _verify_all(pps, n):
    reports = []
    for pp in pps:
        lo, hi, _ = default_grid(pp)
        reports.append((pp, verify(pp, (lo, hi, n))))
    return reports


def cmd_verify(args, params, run) -> int:
    r1, r2 = _solve(params)
    pps = _payoffs(params, r1, r2)
    if not pps:
        _print_solve(params, r1, r2)
        return EXIT_NO_EQ
    reports = _verify_all(pps, run.get("grid", DEFAULT_N))
    for pp, rep in reports:
        print(f"# Type {pp.kind}: thresholds {', '.join(g6(t) for t in pp.thresholds)}")
        if args.verbose:
            sys.stdout.write(rep.to_text())
        else:
            for rec in rep.records:
                status = "pass" if rec.passed else "FAIL"
                print(f"  {rec.cond_id:<28s} {status}  max_violation = {g6(rec.max_violation)}"
                      f"  at x = {g6(rec.argmax)}  (tol {g6(rec.tol)})")
            print(f"  certified: {'yes' if rep.passed else 'no'}")
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(VERIFY_COLUMNS)
        for pp, rep in reports:
            for rec in rep.records:
                w.writerow([pp.kind, rec.cond_id, rec.region, repr(rec.max_violation),
                            repr(rec.argmax), repr(rec.tol), str(rec.passed).lower()])
        _write(buf.getvalue(), args.out)
    return EXIT_OK if all(rep.passed for _, rep in reports) else EXIT_VERIFY


def _default_x0(pp):
    return [float(pp.x1_bar + f * (pp.x2_bar - pp.x1_bar)) for f in (0.25, 0.5, 0.75)]


def _parse_x0(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"--x0 must be a comma-separated list of numbers, got {text!r}") from None


def cmd_simulate(args, params, run) -> int:
    r1, r2 = _solve(params)
    pps = _payoffs(params, r1, r2, args.eq_type)
    if not pps:
        print("no equilibrium to simulate", file=sys.stderr)
        return EXIT_NO_EQ
    pp = pps[0]
    if len(pps) > 1:
        log.info("both types found; simulating Type %s (use --type to choose)", pp.kind)
    lo, hi, _ = default_grid(pp)
    rep = verify(pp, (lo, hi, run.get("grid", DEFAULT_N)))
    if not rep.passed and not args.force:
        print(f"Type {pp.kind} equilibrium failed verification ({', '.join(rep.failed())}); "
              "use --force to simulate anyway", file=sys.stderr)
        return EXIT_VERIFY
    cfg = _sim_config(run)
    cfg.validate(params)
    xs = _parse_x0(args.x0) if args.x0 else _default_x0(pp)
    rows = []
    for x0 in xs:
        est = simulate(x0, (pp.x1_bar, pp.target, pp.x2_bar), params, cfg)
        w1, w2 = float(pp.W1(x0)), float(pp.W2(x0))
        log.info("x0=%s j1=%s+-%s (W1=%s) j2=%s+-%s (W2=%s)", g6(x0), g6(est.j1_mean), g6(est.j1_se),
                 g6(w1), g6(est.j2_mean), g6(est.j2_se), g6(w2))
        rows.append((est, w1, w2))
    _write(estimates_to_csv(rows), args.out)
    return EXIT_OK


def cmd_sweep(args, params, run) -> int:
    if not args.param:
        raise InputError("sweep needs --param")
    try:
        name = field_name(args.param)
    except UnknownParam as exc:
        raise InputError(exc.args[0]) from None
    lo = args.lo if args.lo is not None else getattr(params, name) * 0.5
    hi = args.hi if args.hi is not None else getattr(params, name) * 1.5
    if args.steps < 1:
        raise InputError(f"--steps must be >= 1, got {args.steps}")
    rows = sweep(params, args.param, lo, hi, args.steps)
    _write(sweep_to_csv(rows), args.out)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "simulate": cmd_simulate, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        params, run = _resolve(args)
        if args.dump_config:
            sys.stdout.write(dump_config(params, run))
            return EXIT_OK
        return COMMANDS[args.command](args, params, run)
    except (InputError, ConfigError, InvalidParams, InvalidSimConfig, InvalidStrategy,
            GridTooCoarse) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
