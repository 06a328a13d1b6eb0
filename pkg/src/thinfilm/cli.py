"""
Command-line driver.

    thinfilm run          --config run.ini --out results/
    thinfilm continuation --config cont.ini
    thinfilm inequalities --seed 3
    thinfilm mms
    thinfilm report       --out results/

``run`` executes whatever mode the config names; the other subcommands
force their mode and fill in defaults when no config is given. Every
run writes ``config.ini`` (the resolved config), its tables and a
``summary.json`` into the output directory. Exit codes: 0 success,
2 config error, 3 solver failure, 4 I/O failure; failures also write a
machine-readable ``error.json``.
"""

import argparse
from dataclasses import replace
import json
import logging
from pathlib import Path
import sys

import numpy as np

from . import diagnostics as dg
from . import io
from .continuation import run_continuation, uniform_bound_audit
from .errors import ConfigError, SolverError
from .grid import RegularizationParams, build_grid
from .inequalities import inequality_suite
from .mms import mms_study
from .physical import integrate_physical, mass_in, to_theta_profile
from .stepper import integrate, mass_drift

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4
COMMANDS = ("run", "continuation", "inequalities", "mms", "report")

log = logging.getLogger(__name__)


def _snapshot_times(cfg):
    return np.linspace(0.0, cfg.solver.T_final, cfg.snapshots)


def _write_snapshots(out, traj, mode, params):
    snaps = traj.sampled().snapshots
    for k, u in enumerate(snaps):
        io.write_snapshot(out / f"snapshot_{k:03d}.txt", u, mode, params)
    return len(snaps)


def _write_diagnostics(out, traj, params):
    reports = dg.trajectory_reports(traj, params)
    io.write_csv(out / "diagnostics.csv", dg.CSV_COLUMNS, [r.row() for r in reports])
    return reports


def run_main(cfg, out):
    grid = build_grid(cfg.N)
    u0 = cfg.initial.field(grid)
    traj = integrate(u0, cfg.params, cfg.solver, output_times=_snapshot_times(cfg)[1:])
    n = _write_snapshots(out, traj, cfg.mode, cfg.params)
    reports = _write_diagnostics(out, traj, cfg.params)
    E = [dg.energy(u, cfg.params.delta) for u in traj.snapshots]
    return {"snapshots": n, "steps": len(traj.steps), "mass_drift": mass_drift(traj),
            "max_energy_increase": float(np.max(np.diff(E))) if len(E) > 1 else 0.0,
            "min_u": float(np.min(traj.values)), "final_energy": reports[-1].energy}


def run_physical(cfg, out):
    grid = build_grid(cfg.N)
    u0 = cfg.initial.field(grid)
    traj = integrate_physical(u0, cfg.params, cfg.solver, output_times=_snapshot_times(cfg)[1:])
    n = _write_snapshots(out, traj, cfg.mode, cfg.params)
    _write_diagnostics(out, traj, cfg.params.regularization)
    rows = [(u.t, dg.mass(u), mass_in(u, -1.0, 0.0), mass_in(u, 0.0, 1.0))
            for u in traj.sampled().snapshots]
    io.write_csv(out / "hemispheres.csv", ("t", "mass", "mass_lower", "mass_upper"), rows)
    theta, h = to_theta_profile(traj.final)
    io.write_csv(out / "theta_profile.csv", ("theta", "h"), zip(theta, h))
    return {"snapshots": n, "steps": len(traj.steps), "mass_drift": mass_drift(traj),
            "min_u": float(np.min(traj.values))}


LEVEL_COLUMNS = ("level", "eps", "delta", "failed", "l2w", "h1w", "holder_x", "holder_t",
                 "correction_eps", "correction_delta", "weak_residual", "min_u", "energy_drop")


def run_continuation_mode(cfg, out):
    grid = build_grid(cfg.N)
    u0 = cfg.initial.field(grid)
    rep = run_continuation(u0, cfg.schedule, cfg.solver, cfg.snapshots, cfg.workers)
    ok = [k for k, lv in enumerate(rep.levels) if not lv.failed]
    rows = []
    for i, (a, b) in enumerate(zip(ok[:-1], ok[1:])):
        la, lb = cfg.schedule.levels[a], cfg.schedule.levels[b]
        rows.append((i, la[0], la[1], lb[0], lb[1], rep.distances[i]))
    io.write_csv(out / "convergence.csv",
                 ("k", "eps_k", "delta_k", "eps_k1", "delta_k1", "distance"), rows)
    level_rows = []
    for k, lv in enumerate(rep.levels):
        if not lv.failed:
            sampled = lv.trajectory.sampled()
            io.write_csv(out / f"level_{k}_trajectory.csv",
                         ("t",) + tuple(f"u{i}" for i in range(grid.N)),
                         [(t,) + tuple(v) for t, v in zip(sampled.times, sampled.values)])
        if lv.failed:
            level_rows.append((k, lv.params.eps, lv.params.delta, 1) + ("nan",) * 9)
            continue
        level_rows.append((k, lv.params.eps, lv.params.delta, 0, lv.sup("l2w"), lv.sup("h1w"),
                           lv.sup("holder_x"), lv.holder_t, lv.corrections[0],
                           lv.corrections[1], lv.weak_residual, lv.min_u, lv.energy_drop))
    io.write_csv(out / "levels.csv", LEVEL_COLUMNS, level_rows)
    summary = {"levels": len(rep.levels), "failed_levels": [k for k in range(len(rep.levels))
                                                            if k not in ok],
               "distances": rep.distances, "monotone": rep.monotone}
    if len(ok) >= 2:
        passed, _ = uniform_bound_audit(rep)
        summary["uniform_bound_audit"] = passed
    return summary


def run_inequalities(cfg, out):
    records, summary = inequality_suite(cfg.n_functions, cfg.seed, cfg.N)
    io.write_csv(out / "inequalities.csv", ("name", "check", "value"), records)
    return summary


def run_mms(cfg, out):
    params = cfg.params if isinstance(cfg.params, RegularizationParams) else None
    rows = mms_study(params, cfg.mms_sizes, cfg.mms_T, cfg.mms_dt_factor, cfg=cfg.solver)
    io.write_csv(out / "mms.csv", ("N", "dt", "error", "order"),
                 [(r.N, r.dt, r.error, r.order) for r in rows])
    orders = [r.order for r in rows[1:]]
    return {"errors": [r.error for r in rows], "orders": orders,
            "min_order": min(orders) if orders else None}


RUNNERS = {"main": run_main, "physical": run_physical, "continuation": run_continuation_mode,
           "inequalities": run_inequalities, "mms": run_mms}


def execute(cfg, out):
    """Run ``cfg`` and write its artifacts into ``out``; returns the summary dict."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.ini").write_text(io.serialize_config(cfg), encoding="utf-8")
    summary = {"mode": cfg.mode, "version": io.FORMAT_VERSION}
    summary.update(RUNNERS[cfg.mode](cfg, out))
    io.write_json(out / "summary.json", summary)
    return summary


def report(out):
    """Human-readable digest of an output directory."""
    out = Path(out)
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    lines = [f"{out}: mode {summary.get('mode')}"]
    for k in sorted(summary):
        if k not in ("mode", "version"):
            lines.append(f"  {k}: {summary[k]}")
    for name in sorted(p.name for p in out.glob("*.csv")):
        _, rows = io.read_csv(out / name)
        lines.append(f"  {name}: {len(rows)} rows")
    return "\n".join(lines)


def _default_config(mode):
    if mode in ("main", "continuation", "mms"):
        return io.RunConfig(mode, params=RegularizationParams(1e-2, 1e-1, 1.0))
    if mode == "inequalities":
        return io.RunConfig(mode, N=129)
    raise ConfigError(f"mode {mode!r} needs a config file", key="mode")


def _resolve(args):
    if args.config:
        cfg = io.load_config(args.config, strict=args.strict)
    else:
        cfg = _default_config("main" if args.command == "run" else args.command)
    if args.command not in ("run", "report") and cfg.mode != args.command:
        cfg = replace(cfg, mode=args.command)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out:
        cfg = replace(cfg, out=args.out)
    return cfg


def _fail(code, exc, out=None):
    err = {"exit_code": code, "error": type(exc).__name__, "message": str(exc),
           "key": getattr(exc, "key", None)}
    text = json.dumps(err, sort_keys=True)
    print(text, file=sys.stderr)
    if out is not None:
        try:
            Path(out).mkdir(parents=True, exist_ok=True)
            (Path(out) / "error.json").write_text(text + "\n", encoding="utf-8")
        except OSError:
            pass
    return code


def build_parser():
    ap = argparse.ArgumentParser(prog="thinfilm", description=__doc__.split("\n\n")[0].strip())
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH")
        p.add_argument("--out", metavar="DIR")
        p.add_argument("--seed", type=int)
        p.add_argument("--strict", action="store_true", help="reject unknown config keys")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "report":
        try:
            print(report(args.out or "out"))
        except (OSError, ValueError) as exc:
            return _fail(EXIT_IO, exc)
        return EXIT_OK
    try:
        cfg = _resolve(args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc, args.out)
    except OSError as exc:
        return _fail(EXIT_IO, exc, args.out)
    try:
        summary = execute(cfg, cfg.out)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc, cfg.out)
    except SolverError as exc:
        return _fail(EXIT_SOLVER, exc, cfg.out)
    except OSError as exc:
        return _fail(EXIT_IO, exc, cfg.out)
    print(json.dumps(io._jsonable(summary), sort_keys=True))
    return EXIT_OK
