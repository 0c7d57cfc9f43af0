"""Command-line entry point: ``sppm {solve,sweep,check-critical,list-problems}``.

Settings come from flags, optionally layered over a config file given with
``--config`` (``key = value`` lines, or a JSON object).  Flags win.  Every
usage or configuration error exits with status 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

import numpy as np

from .criticality import check_criticality
from .diagnostics import export_run, sweep_to_csv, write_text_atomic
from .driver import DriverParams, run_sppm, run_sweep, sweep_rows
from .errors import SPPMError
from .library import CATALOG, load_problem, problem_from_spec
from .scalarizer import ScalarizationParams, uniform_weights
from .subproblem import InnerOptions

_INNER_KEYS = {f.name for f in fields(InnerOptions)}


class UsageError(Exception):
    pass


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines (``#`` comments allowed) or a JSON object."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config is not valid JSON: {exc}") from None
        return {k.replace("-", "_"): v for k, v in data.items()}
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _floats(value, name) -> list[float]:
    if isinstance(value, (list, tuple)):
        items = value
    else:
        items = [v for v in str(value).replace(" ", "").split(",") if v]
    try:
        return [float(v) for v in items]
    except ValueError:
        raise UsageError(f"{name} must be a comma-separated list of numbers, got {value!r}") from None


def _settings(args) -> dict:
    conf = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                conf = parse_config(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config", "func")}
    return {**conf, **flags}


def _problem(settings):
    pid = settings.get("problem")
    if pid is None:
        raise UsageError("no problem given (use --problem ID; see 'list-problems')")
    pid = str(pid)
    if pid.lstrip().startswith("{"):
        return problem_from_spec(pid)
    return load_problem(pid)


def _driver_params(settings, problem) -> DriverParams:
    inner_kw = {}
    for key in _INNER_KEYS:
        if key in settings:
            typ = int if key in ("max_inner_iters", "max_backtracks", "n_starts") else float
            inner_kw[key] = typ(settings[key])
    z = settings.get("weights")
    if z is not None:
        z = np.asarray(_floats(z, "weights"))
        if z.size != problem.m:
            raise UsageError(f"--weights needs {problem.m} entries for {problem.name}, got {z.size}")
        if np.any(z < 0) or not np.any(z > 0):
            raise UsageError("weights z must be nonnegative and not all zero")
        if np.any(z == 0):
            print("warning: objectives with zero weight influence the iterates only through the level set",
                  file=sys.stderr)
        z = z / np.linalg.norm(z)
    else:
        z = uniform_weights(problem.m)
    e = settings.get("e")
    if e is not None:
        e = np.asarray(_floats(e, "e"))
        if e.size != problem.m:
            raise UsageError(f"--e needs {problem.m} entries, got {e.size}")
        if not np.all(e > 0):
            raise UsageError("direction e must be strictly positive")
        e = e / np.linalg.norm(e)
    else:
        e = uniform_weights(problem.m)
    sched = ScalarizationParams(z=tuple(z), e=tuple(e), alpha=float(settings.get("alpha", 1.0)))
    mode = str(settings.get("exp_transform", "auto"))
    if mode not in ("auto", "on", "off"):
        raise UsageError(f"--exp-transform must be auto, on or off, got {mode!r}")
    x0 = settings.get("x0")
    if x0 is not None:
        x0 = tuple(_floats(x0, "x0"))
        if len(x0) != problem.n:
            raise UsageError(f"--x0 needs {problem.n} coordinates, got {len(x0)}")
    return DriverParams(
        max_outer_iters=int(settings.get("max_iter", 500)),
        step_tol=float(settings.get("step_tol", 1e-6)),
        schedule=sched,
        inner=InnerOptions(**inner_kw),
        apply_exp_transform={"auto": None, "on": True, "off": False}[mode],
        seed=int(settings.get("seed", 0)),
        x0=x0,
    )


def cmd_solve(args) -> int:
    s = _settings(args)
    problem = _problem(s)
    params = _driver_params(s, problem)
    fmt = str(s.get("format", "csv"))
    if fmt not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {fmt!r}")
    run = run_sppm(problem, params)
    if s.get("output"):
        export_run(run, fmt, s["output"])
    fc = run.final_criticality
    print(f"{problem.name}: termination={run.termination} iterations={len(run.history) - 1} "
          f"criticality={fc.method} residual={fc.residual:.3e} critical={fc.critical} "
          f"x={list(run.final.x)}")
    return 0 if run.termination in ("critical", "step-tol") else 1


def cmd_sweep(args) -> int:
    s = _settings(args)
    problem = _problem(s)
    grid = int(s.get("grid", 10))
    if grid < 2:
        raise UsageError(f"--grid must be at least 2, got {grid}")
    if problem.m != 2:
        raise UsageError(f"sweep supports m = 2 only; {problem.name} has m = {problem.m}")
    params = _driver_params(s, problem)
    results = run_sweep(problem, params, grid, jobs=int(s.get("jobs", 1)), alpha=params.schedule.alpha)
    text = sweep_to_csv(sweep_rows(results))
    if s.get("output"):
        write_text_atomic(s["output"], text)
    else:
        sys.stdout.write(text)
    bad = [t for t, run in results if run.termination not in ("critical", "step-tol")]
    print(f"{problem.name}: {len(results)} runs, {len(bad)} without convergence", file=sys.stderr)
    return 0 if not bad else 1


def cmd_check_critical(args) -> int:
    s = _settings(args)
    problem = _problem(s)
    if s.get("point") is None:
        raise UsageError("--point is required")
    x = np.asarray(_floats(s["point"], "point"))
    if x.size != problem.n:
        raise UsageError(f"--point needs {problem.n} coordinates for {problem.name}, got {x.size}")
    method = str(s.get("method", "auto"))
    if method not in ("auto", "smooth", "sampled"):
        raise UsageError(f"--method must be auto, smooth or sampled, got {method!r}")
    if method == "smooth" and not problem.smooth:
        raise UsageError(f"{problem.name} is not smooth; use --method sampled")
    tol = s.get("crit_tol")
    report = check_criticality(problem, x, method=method, seed=int(s.get("seed", 0)),
                               crit_tol=float(tol) if tol is not None else None,
                               n_dirs=int(s.get("n_dirs", 64)))
    print(f"method={report.method} residual={report.residual:.6e} tolerance={report.tolerance:g} "
          f"critical={report.critical} directions={report.n_directions}")
    if report.witness_direction is not None:
        print(f"witness_direction={list(report.witness_direction)}")
    return 0 if report.critical else 1


def cmd_list(args) -> int:
    for pid, entry in CATALOG.items():
        p = entry.factory()
        flags = ",".join(f for f in ("smooth", "convex", "positive") if getattr(p, f)) or "-"
        print(f"{pid:14s} n={p.n} m={p.m} flags={flags:22s} {entry.description}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sppm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value (or JSON) config file; flags override it")
        p.add_argument("--problem", help="catalog id or inline JSON problem description")
        p.add_argument("--seed", type=int)

    def run_opts(p):
        p.add_argument("--weights", help="comma-separated nonnegative weights z (normalized)")
        p.add_argument("--e", help="comma-separated positive direction e (normalized)")
        p.add_argument("--alpha", type=float, help="proximal parameter, 0 < alpha < 1e6")
        p.add_argument("--max-iter", type=int, dest="max_iter")
        p.add_argument("--step-tol", type=float, dest="step_tol")
        p.add_argument("--inner-tol", type=float, dest="inner_tol")
        p.add_argument("--exp-transform", choices=("auto", "on", "off"), dest="exp_transform")
        p.add_argument("--x0", help="comma-separated initial point (default: seeded draw in [-5,5]^n)")
        p.add_argument("--output", help="output file (default: no file for solve, stdout for sweep)")

    p = sub.add_parser("solve", help="run the method on one problem")
    common(p)
    run_opts(p)
    p.add_argument("--format", choices=("csv", "json"))
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="one run per weight (t, 1-t); m = 2 only")
    common(p)
    run_opts(p)
    p.add_argument("--grid", type=int, help="number of weight intervals (>= 2)")
    p.add_argument("--jobs", type=int, help="concurrent runs")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check-critical", help="test a point for Pareto-Clarke criticality")
    common(p)
    p.add_argument("--point", help="comma-separated point")
    p.add_argument("--method", choices=("auto", "smooth", "sampled"))
    p.add_argument("--crit-tol", type=float, dest="crit_tol")
    p.add_argument("--n-dirs", type=int, dest="n_dirs")
    p.set_defaults(func=cmd_check_critical)

    p = sub.add_parser("list-problems", help="show the problem catalog")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SPPMError, ValueError) as exc:
        print(f"sppm {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
