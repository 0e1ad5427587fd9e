"""Command-line front end: ``khessian <subcommand> --config run.ini [options]``.

Every subcommand prints one JSON object carrying ``schema_version`` on
stdout and writes its CSV artifacts to ``--out`` (or ``[output] dir``).
Exit codes: 0 success, 1 domain or assumption error, 2 numeric failure,
64 usage error, 66 unreadable config. Errors are one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bifurcation, classify, config, solver
from .errors import DomainError, NumericError
from .exponents import exponent_summary, p4_coords, q_jl, q_star
from .profiles import Orbit, RadialSolution, read_columns, write_columns
from .transform import LVField, PhasePoint
from .weights import check_assumptions

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_NUMERIC = 2
EXIT_USAGE = 64
EXIT_NOINPUT = 66

log = logging.getLogger("khessian")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _clean(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, float) and v == 0.0:
        return 0.0
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_clean(x) for x in v]
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def emit(obj: dict, stream=None):
    out = {"schema_version": SCHEMA_VERSION}
    out.update(_clean(obj))
    print(json.dumps(out, sort_keys=True), file=stream or sys.stdout)


def _out_path(args, rc, default_name):
    if args.out:
        return Path(args.out)
    rc.output_dir.mkdir(parents=True, exist_ok=True)
    return rc.output_dir / default_name


def _write_artifact(path: Path, names, cols, fmt):
    if fmt == "json":
        with open(path, "w") as fh:
            json.dump({"schema_version": SCHEMA_VERSION,
                       **{nm: [float(v) for v in c] for nm, c in zip(names, cols)}}, fh)
            fh.write("\n")
    else:
        write_columns(path, names, cols)
    return str(path)


# ---------------------------------------------------------------------------
# subcommands


def cmd_exponents(args, rc):
    p, wt = rc.params, rc.weight
    l0 = wt.l0 if args.l0 is None else args.l0
    l_inf = wt.l_inf if args.l_inf is None else args.l_inf
    res = {
        "q_star": q_star(p.k, l0, p.n),
        "q_jl": q_jl(p.k, l0, p.n),
        "P4": list(p4_coords(p, l0)),
        "summary": exponent_summary(p, l0, l_inf),
    }
    return res


def cmd_check_weight(args, rc):
    rep = check_assumptions(rc.weight, rc.params)
    return {"report": rep.to_dict(), "weight": rc.weight.describe()}


def cmd_solve(args, rc):
    sol = solver.solve_ivp(rc.params, rc.weight, args.w0, args.r_max, rc.integrator)
    path = _write_artifact(_out_path(args, rc, "profile." + rc.output_format), ("r", "w", "wprime"),
                           (sol.r, sol.w, sol.wp), rc.output_format)
    return {"w0": args.w0, "r_max": float(sol.r[-1]), "w_end": float(sol.w[-1]),
            "samples": int(sol.r.size), "truncated": sol.truncated, "reason": sol.reason,
            "stats": sol.stats, "artifact": path}


def _build_orbit(args, rc) -> Orbit:
    p, wt, cfg = rc.params, rc.weight, rc.integrator
    if getattr(args, "from_profile", None):
        r, w, wp = read_columns(args.from_profile, ("r", "w", "wprime"))
        sol = RadialSolution(r, w, wp, float(w[0]), p, wt, {"source": args.from_profile})
        return solver.profile_to_orbit(sol)
    if getattr(args, "p2", False):
        return solver.p2_orbit(p, wt, T=args.t_end, cfg=cfg)
    if getattr(args, "x0", None) is not None:
        if args.y0 is None:
            raise DomainError("--x0 needs --y0")
        return solver.solve_orbit(LVField(p, wt), PhasePoint(args.t0, args.x0, args.y0), args.t_end, cfg)
    if args.w0 is None:
        raise DomainError("give --w0, --from-profile, --p2 or --x0/--y0")
    return solver.regular_orbit(p, wt, args.w0, args.t_end, cfg)


def _orbit_summary(orb: Orbit) -> dict:
    return {"provenance": orb.provenance, "t": [float(orb.t[0]), float(orb.t[-1])],
            "end": [float(orb.x[-1]), float(orb.y[-1])], "samples": int(orb.t.size),
            "truncated": orb.truncated, "reason": orb.reason, "stats": orb.stats}


def cmd_orbit(args, rc):
    orb = _build_orbit(args, rc)
    path = _write_artifact(_out_path(args, rc, "orbit." + rc.output_format), ("t", "x", "y"),
                           (orb.t, orb.x, orb.y), rc.output_format)
    return {**_orbit_summary(orb), "artifact": path}


def cmd_singular(args, rc):
    res = solver.singular_solution(rc.params, rc.weight, rc.integrator, T=args.T, t_end=args.t_end)
    prof = res.profile
    path = _write_artifact(_out_path(args, rc, "singular." + rc.output_format), ("r", "w", "wprime"),
                           (prof.r, prof.w, prof.wp), rc.output_format)
    return {"lambda_tilde": res.lambda_tilde, "w_at_1": float(prof(1.0)), "T": args.T,
            "orbit_start": [float(res.orbit.x[0]), float(res.orbit.y[0])], "artifact": path}


def cmd_classify(args, rc):
    orb = _build_orbit(args, rc)
    rep = check_assumptions(rc.weight, rc.params)
    cls = classify.classify_orbit(orb)
    cls.flags = dict(rep.flags)
    out = {"classification": cls.to_dict(), "orbit": _orbit_summary(orb),
           "assumptions": {k: v.status for k, v in rep.entries.items()},
           "never_in_G_minus": classify.never_in_G_minus(orb)}
    if cls.verdict != classify.UNDETERMINED:
        try:
            out["slope"] = classify.slope_checks(orb, cls)
        except DomainError as exc:
            out["slope"] = {"reason": str(exc)}
    if args.emit_orbit:
        out["artifact"] = _write_artifact(Path(args.emit_orbit), ("t", "x", "y"),
                                          (orb.t, orb.x, orb.y), rc.output_format)
    return out


def _sweep(args, rc):
    return bifurcation.sweep(rc.params, rc.weight, args.amin, args.amax, args.count,
                             rc.integrator, jobs=args.jobs)


def cmd_sweep(args, rc):
    curve = _sweep(args, rc)
    path = _write_artifact(_out_path(args, rc, "sweep." + rc.output_format), ("a", "lambda"),
                           (curve.a, curve.lam), rc.output_format)
    return {"lambda_tilde": curve.lambda_tilde, "count": int(curve.a.size),
            "lambda_end": float(curve.lam[-1]), "lambda_max": float(curve.lam.max()),
            "relative_gap_end": float((curve.lam[-1] - curve.lambda_tilde) / curve.lambda_tilde),
            "artifact": path}


def cmd_count(args, rc):
    curve = _sweep(args, rc)
    query = curve.lambda_tilde if args.lam is None else args.lam
    roots = bifurcation.solution_roots(curve, query)
    return {"lambda": query, "count": len(roots), "a_roots": roots,
            "lambda_tilde": curve.lambda_tilde, "grid": list(curve.grid)}


def _interval(text):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise DomainError(f"--interval must be 'lo,hi', got {text!r}") from None
    return lo, hi


def cmd_intersections(args, rc):
    lo, hi = _interval(args.interval)
    p, wt, cfg = rc.params, rc.weight, rc.integrator
    t_end = max(10.0, math.log(hi) + 1.0)
    sing = solver.singular_solution(p, wt, cfg, t_end=t_end)
    ps = replace(p, lam=sing.lambda_tilde)
    reg = solver.solve_ivp(ps, wt, -args.a, hi, cfg)
    n, pts = bifurcation.intersection_count(sing.profile, reg, (lo, hi), return_points=True)
    return {"a": args.a, "interval": [lo, hi], "count": n, "points": pts,
            "lambda_tilde": sing.lambda_tilde}


def cmd_maximal(args, rc):
    res = solver.maximal_solution_iterate(rc.params, rc.weight, args.tol, args.max_iter, rc.integrator)
    path = _write_artifact(_out_path(args, rc, "maximal." + rc.output_format), ("r", "u"),
                           (res.r, res.u), rc.output_format)
    return {"lambda": res.lam, "converged": res.converged, "iterations": res.iterations,
            "u_at_0": float(res.u[0]), "reason": res.reason, "artifact": path}


def cmd_lambda_star(args, rc):
    lo, hi = solver.estimate_lambda_star(rc.params, rc.weight, rc.integrator, rel_width=args.rel_width)
    return {"bracket": [lo, hi], "lower_bound": solver.lambda_lower_bound(rc.params, rc.weight)}


COMMANDS = {
    "exponents": cmd_exponents,
    "check-weight": cmd_check_weight,
    "solve": cmd_solve,
    "orbit": cmd_orbit,
    "singular": cmd_singular,
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "count": cmd_count,
    "intersections": cmd_intersections,
    "maximal": cmd_maximal,
    "lambda-star": cmd_lambda_star,
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="khessian", description="Radial k-Hessian equations via the Lotka-Volterra transform.")
    ap.add_argument("--verbose", "-v", action="store_true")
    sub = ap.add_subparsers(dest="command", metavar="subcommand", parser_class=_Parser)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", "-c", help="INI run file")
        for nm, tp in (("n", int), ("k", int), ("q", float)):
            sp.add_argument(f"--{nm}", type=tp, help=f"override [params] {nm}")
        sp.add_argument("--lam", type=float, dest="lam_param", help="override [params] lambda")
        sp.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a config field (repeatable)")
        sp.add_argument("--out", help="artifact path (default: [output] dir)")
        sp.add_argument("--jobs", type=int, default=os.cpu_count(), help="worker pool size")
        return sp

    sp = add("exponents", "critical exponents and stationary points")
    sp.add_argument("--l0", type=float)
    sp.add_argument("--linf", "--l-inf", dest="l_inf", type=float)
    add("check-weight", "sampled checks of the weight hypotheses")
    sp = add("solve", "regular radial solution")
    sp.add_argument("--w0", type=float, default=-1.0)
    sp.add_argument("--r-max", "--rmax", dest="r_max", type=float, default=10.0)
    for name in ("orbit", "classify"):
        sp = add(name, "phase-plane orbit" if name == "orbit" else "omega-limit classification")
        sp.add_argument("--w0", type=float)
        sp.add_argument("--from-profile", dest="from_profile", metavar="CSV")
        sp.add_argument("--p2", action="store_true", help="orbit on the stable manifold of P2")
        sp.add_argument("--x0", type=float)
        sp.add_argument("--y0", type=float)
        sp.add_argument("--t0", type=float, default=0.0)
        sp.add_argument("--t-end", dest="t_end", type=float, default=40.0)
        if name == "classify":
            sp.add_argument("--emit-orbit", dest="emit_orbit", metavar="PATH")
    sp = add("singular", "singular solution and lambda~")
    sp.add_argument("--T", type=float, default=30.0)
    sp.add_argument("--t-end", dest="t_end", type=float, default=10.0)
    for name in ("sweep", "count"):
        sp = add(name, "lambda(a) curve" if name == "sweep" else "number of solutions at a given lambda")
        sp.add_argument("--amin", type=float, default=1.0)
        sp.add_argument("--amax", type=float, default=1e4)
        sp.add_argument("--count", type=int, default=64)
        if name == "count":
            sp.add_argument("--lambda", dest="lam", type=float, help="default: lambda~")
    sp = add("intersections", "zeros of singular minus regular profile")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--interval", default="0,1")
    sp = add("maximal", "monotone iteration for the maximal solution")
    sp.add_argument("--lambda", dest="lam_param", type=float, help="same as --lam")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", dest="max_iter", type=int, default=5000)
    sp = add("lambda-star", "bracket of the extremal parameter")
    sp.add_argument("--rel-width", dest="rel_width", type=float, default=1e-3)
    return ap


def _fail(code, kind, message):
    emit({"error": kind, "message": " ".join(str(message).split()), "exit": code}, sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand; one of " + ", ".join(COMMANDS))
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.jobs is not None and args.jobs < 1:
        return _fail(EXIT_USAGE, "usage", "--jobs must be >= 1")
    try:
        raw = config.read_ini(args.config) if args.config else {}
        flags = [f"params.{nm}={v}" for nm, v in (("n", args.n), ("k", args.k), ("q", args.q),
                                                   ("lambda", args.lam_param)) if v is not None]
        rc = config.build(config.apply_overrides(raw, flags + args.set))
        res = COMMANDS[args.command](args, rc)
    except config.ConfigReadError as exc:
        return _fail(EXIT_NOINPUT, "config", exc)
    except (DomainError, OSError) as exc:
        return _fail(EXIT_DOMAIN, type(exc).__name__, exc)
    except (NumericError, ArithmeticError) as exc:
        return _fail(EXIT_NUMERIC, type(exc).__name__, exc)
    emit({"command": args.command, **res})
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
