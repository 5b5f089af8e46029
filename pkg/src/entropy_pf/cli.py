"""Command-line interface: ``entropy-pf {run,sweep,verify,plot,validate,tabulate-lneps}``.

Exit codes: 0 success, 2 configuration error, 3 Newton divergence,
4 invariant violation, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .artifacts import write_run
from .config import demo_config_path, parse_config
from .diagnostics import build_report, energy_monitors
from .errors import ConfigError, NewtonDivergence, SpecValidationError, StepFailure
from .model import validate_spec
from .monotone import RegularizedLog
from .oracle import fine_explicit_reference
from .stepper import simulate

EXIT_OK, EXIT_CONFIG, EXIT_NEWTON, EXIT_INVARIANT, EXIT_IO = 0, 2, 3, 4, 5


def _err(msg):
    print(msg, file=sys.stderr)


def _resolve_config_path(arg) -> Path:
    p = Path(arg)
    if p.exists():
        return p
    try:
        return demo_config_path(p.stem)
    except FileNotFoundError:
        raise FileNotFoundError(f"config file {arg!r} not found (and no shipped demo of that name)") from None


def _load(args, validate=True):
    path = _resolve_config_path(args.config)
    rc = parse_config(path, validate=validate)
    for key in rc.defaults_applied:
        sec, k = key.split(".")
        if not args.quiet:
            _err(f"default: {key} = {rc.values[sec][k]}")
    return rc


def _oracle_first_step(traj):
    """Compare the first implicit step with a forward-Euler reference at a tiny step."""
    spec, cfg = traj.spec, traj.cfg
    t1 = traj.times[1]
    h = spec.grid.h
    guard = h * h / (2.0 * (cfg.eps + 1.0 / cfg.eps))
    k = math.ceil(t1 / min(t1 / 1000.0, 0.9 * guard))
    ref = fine_explicit_reference(spec, cfg.eps, t1 / k, [t1])
    rth, rch = ref[t1]
    return {
        "reference_steps": k,
        "first_step_gap_theta": float(np.max(np.abs(traj.theta[1] - rth))),
        "first_step_gap_chi": float(np.max(np.abs(traj.chi[1] - rch))),
        "dt": t1,
    }


def cmd_run(args) -> int:
    rc = _load(args)
    outdir = Path(args.outdir or rc.output.dir)
    run_dir = outdir / (args.run_id or rc.name)
    try:
        traj = simulate(rc.spec, rc.scheme, snapshot_every=rc.output.stride)
    except StepFailure as exc:
        _err(f"error: {exc}")
        return EXIT_NEWTON
    report = build_report(traj)
    lines = []
    if args.with_oracle:
        info = _oracle_first_step(traj)
        lines = [f"oracle.{k} = {v!r}" for k, v in info.items()]
    write_run(run_dir, traj, report, rc.resolved_text())
    if lines:
        with open(run_dir / "report.txt", "a") as fh:
            fh.write("\n".join(lines) + "\n")
    if args.plot or rc.output.plots:
        from .plotting import render_run

        render_run(run_dir)
    if not args.quiet:
        print(report.to_text() + "\n".join(lines), end="\n" if lines else "")
        print(f"wrote {run_dir}")
    if not report.passed:
        bad = [c.name for c in report.checks if not c.passed]
        _err(f"invariant violation: {', '.join(bad)}")
        return EXIT_INVARIANT
    return EXIT_OK


def _sweep_job(spec, cfg, value):
    a = simulate(spec, replace(cfg, eps=value))
    b = simulate(spec, replace(cfg, eps=value / 2))
    from .suites import l2q_distance

    return value, l2q_distance(a, b), energy_monitors(a), build_report(a).to_text()


def cmd_sweep(args) -> int:
    rc = _load(args)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values: cannot parse {args.values!r}") from None
    if not values:
        raise ConfigError("--values is empty")
    outdir = Path(args.outdir or rc.output.dir) / (args.run_id or f"{rc.name}_sweep_{args.param}")
    outdir.mkdir(parents=True, exist_ok=True)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_job, [rc.spec] * len(values), [rc.scheme] * len(values), values))
    else:
        results = [_sweep_job(rc.spec, rc.scheme, v) for v in values]
    rows = sorted(results, key=lambda r: -r[0])
    names = list(rows[0][2])
    with open(outdir / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eps", "l2q_distance_to_half"] + names)
        for v, d, mon, _ in rows:
            w.writerow([repr(v), repr(d)] + [repr(mon[k]) for k in names])
    for v, _, _, text in rows:
        sub = outdir / f"eps_{v:g}"
        sub.mkdir(exist_ok=True)
        (sub / "report.txt").write_text(text)
        (sub / "resolved.cfg").write_text(rc.resolved_text().replace(
            f"eps = {rc.values['scheme']['eps']}", f"eps = {v!r}"))
    dist = [r[1] for r in rows]
    decreasing = all(b < a for a, b in zip(dist, dist[1:]))
    if not args.quiet:
        print("eps,l2q_distance_to_half")
        for v, d, _, _ in rows:
            print(f"{v:g},{d:.6e}")
        print(f"distances strictly decreasing: {'yes' if decreasing else 'no'}")
        print(f"wrote {outdir}")
    return EXIT_OK if decreasing else EXIT_INVARIANT


def cmd_verify(args) -> int:
    from .suites import run_suites

    results = run_suites(args.suite or None, include_slow=args.all)
    for r in results:
        print(r.line())
        if args.verbose or not r.passed:
            print("\n".join(r.details()))
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} suites passed")
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_plot(args) -> int:
    from .plotting import render_run

    for p in render_run(args.run_dir):
        print(f"wrote {p}")
    return EXIT_OK


def cmd_validate(args) -> int:
    rc = _load(args, validate=False)
    report = validate_spec(rc.spec)
    if not report:
        print(f"{rc.source_path}: valid")
        return EXIT_OK
    for v in report:
        print(str(v))
    return EXIT_CONFIG


def cmd_tabulate(args) -> int:
    eps_values = [float(v) for v in args.eps.split(",")]
    r = np.linspace(args.r_min, args.r_max, args.points)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("eps", "r", "ln_eps", "ln_eps_prime"))
        for e in eps_values:
            log = RegularizedLog(e)
            for ri, v, d in zip(r, log.ln_eps(r), log.ln_eps_prime(r)):
                w.writerow((repr(e), format(ri, ".17g"), format(v, ".17g"), format(d, ".17g")))
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="entropy-pf", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("config", nargs="?", help="config file or shipped demo name")
        p.add_argument("--config", dest="config_flag", metavar="PATH")
        p.add_argument("-q", "--quiet", action="store_true")

    p = sub.add_parser("run", help="simulate one configuration")
    with_config(p)
    p.add_argument("--outdir")
    p.add_argument("--run-id")
    p.add_argument("--plot", action="store_true", help="render SVG plots after the run")
    p.add_argument("--with-oracle", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="parameter sweep with distances to the halved parameter")
    with_config(p)
    p.add_argument("--param", choices=["eps"], default="eps")
    p.add_argument("--values", default="1e-1,1e-2,1e-3,1e-4")
    p.add_argument("--outdir")
    p.add_argument("--run-id")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the property suites")
    p.add_argument("--all", action="store_true", help="include the simulation-heavy suites")
    p.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="render SVG plots from a run directory")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("validate", help="check a configuration against the structural hypotheses")
    with_config(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("tabulate-lneps", help="CSV table of ln_eps and its derivative")
    p.add_argument("--eps", default="0.1,0.01,0.001")
    p.add_argument("--r-min", type=float, default=-2.0)
    p.add_argument("--r-max", type=float, default=5.0)
    p.add_argument("--points", type=int, default=71)
    p.add_argument("--output")
    p.set_defaults(func=cmd_tabulate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if hasattr(args, "config_flag"):
        args.config = args.config_flag or args.config
        if args.config is None:
            ap.error("a config file is required")
    try:
        return args.func(args)
    except (ConfigError, SpecValidationError) as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    except (StepFailure, NewtonDivergence) as exc:
        _err(f"error: {exc}")
        return EXIT_NEWTON
    except OSError as exc:
        _err(f"I/O error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
