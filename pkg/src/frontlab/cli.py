"""Command-line entry points.

Exit codes: 0 = all pass flags true, 2 = an experiment check failed,
1 = error (bad config, solver failure, ...).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import pde, tracking
from .config import ConfigValidationError, RunConfig, load_config, parse_config
from .experiments import ExperimentSpec, run_experiment
from .homogeneous import solve_bistable_wave, solve_ignition_floor_wave
from .nonlinearity import bistable_extension, validate_hypotheses
from .reporting import emit_plot, emit_report


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--seed", type=int, help="random seed override")
    p.add_argument("--h", type=float, dest="h", help="grid spacing override")
    p.add_argument("--dt", type=float, help="time step override")
    p.add_argument("--horizon", type=float, help="experiment horizon override")


def _load(args) -> RunConfig:
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = parse_config({})
    if args.seed is not None:
        cfg.seed = args.seed
    if args.h is not None:
        cfg.h = args.h
    if args.dt is not None:
        cfg.dt = args.dt
        bound = 1.0 / cfg.model.lip_const
        if args.dt > bound:
            raise ConfigValidationError(
                f"--dt={args.dt} violates dt <= 1/C_Lip = {bound:.6g}")
    if args.horizon is not None:
        cfg.experiment_params["horizon"] = args.horizon
    if args.out is not None:
        cfg.output = str(args.out)
    return cfg


def _spec(cfg: RunConfig, kind: str) -> ExperimentSpec:
    return ExperimentSpec(
        model=cfg.model, kind=kind, h=cfg.h, dt=cfg.dt,
        window_width=cfg.window_width,
        recenter_threshold=cfg.recenter_threshold, seed=cfg.seed,
        params=tuple(sorted(cfg.experiment_params.items())))


def _run_experiment_command(args, kind: str) -> int:
    cfg = _load(args)
    spec = _spec(cfg, kind)
    report = run_experiment(spec)
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config_echo.json").write_text(
        json.dumps(cfg.echo(), indent=2, sort_keys=True) + "\n")
    emit_report(report, out)
    if "spectrum" in report.series:
        emit_plot(report.series["spectrum"], out / "spectrum.svg",
                  module_points=report.fitted.get("module_points"))
    for name in ("distance", "front", "speed"):
        if name in report.series:
            emit_plot(report.series[name], out / f"{name}.svg")
    for check in report.checks:
        print(check.line())
    return 0 if report.passed else 2


def cmd_validate(args) -> int:
    cfg = _load(args)
    report = validate_hypotheses(cfg.model)
    for name in ("h1", "h2", "h3", "h4"):
        status = "PASS" if getattr(report, name) else "FAIL"
        witness = report.witnesses.get(name, "")
        print(f"{status} {name.upper()}"
              + (f" witness: {witness}" if witness else ""))
    print(f"beta={report.beta:.6g} g_min={report.g_min:.6g} "
          f"g_max={report.g_max:.6g} C_Lip={report.c_lip:.6g}")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "hypotheses.json").write_text(json.dumps({
            "h1": report.h1, "h2": report.h2, "h3": report.h3,
            "h4": report.h4, "beta": report.beta, "g_min": report.g_min,
            "g_max": report.g_max, "c_lip": report.c_lip,
            "witnesses": {k: list(v) if isinstance(v, tuple) else v
                          for k, v in report.witnesses.items()},
        }, indent=2, sort_keys=True) + "\n")
    return 0 if report.all_pass else 2


def cmd_wave(args) -> int:
    cfg = _load(args)
    model = cfg.model
    fb = bistable_extension(model)
    wb = solve_bistable_wave(fb, 1e-8, fprime=fb.derivative)
    wi = solve_ignition_floor_wave(model.f_sup, theta_I=model.theta / 4.0,
                                   theta=model.theta, tolerance=1e-8)
    print(f"c_B = {wb.speed:.8f} (bistable comparison wave)")
    print(f"c_I = {wi.speed:.8f} (ignition-floor comparison wave)")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        wb.to_csv(out / "wave_bistable.csv")
        wi.to_csv(out / "wave_ignition_floor.csv")
        print(f"profiles written to {out}")
    return 0


def cmd_evolve(args) -> int:
    cfg = _load(args)
    model = cfg.model
    horizon = cfg.experiment_params.get("horizon", 50.0)
    solver = pde.SolverConfig(dt=cfg.dt_effective,
                              window_width=cfg.window_width,
                              recenter_threshold=cfg.recenter_threshold,
                              max_lip=model.lip_const)
    count = int(round(cfg.window_width / cfg.h)) + 1
    grid = pde.Grid1D(-cfg.window_width / 2.0, cfg.h, count)
    fld = pde.step_initial_data(grid)
    final, raw = pde.evolve(fld, model, solver, horizon,
                            levels=(model.theta, 0.1, 0.5, 0.9),
                            record_every=5)
    trace = tracking.FrontTrace.from_evolution(raw, model.theta)
    xi = tracking.interface_location(final, model.theta)
    prof = tracking.extract_profile(final, xi)
    print(f"evolved to t={final.time:.4g}; xi_theta={xi:.6g}; "
          f"edge drift={raw.edge_drift:.3e}")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        trace.to_csv(out / "trace.csv")
        np.savetxt(out / "snapshot.csv",
                   np.column_stack([final.grid.x, final.values]),
                   delimiter=",", header="x,u", comments="", fmt="%.17g")
        emit_plot(trace, out / "trace.svg")
        emit_plot(prof, out / "profile.svg")
        print(f"trace and snapshot written to {out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="frontlab",
        description="Reaction-diffusion front laboratory for "
                    "time-heterogeneous ignition media")
    sub = parser.add_subparsers(dest="command", required=True)

    commands = {
        "validate": cmd_validate,
        "wave": cmd_wave,
        "evolve": cmd_evolve,
    }
    for name in ("validate", "wave", "evolve", "stability", "uniqueness",
                 "monotonicity", "recurrence", "speed"):
        p = sub.add_parser(name)
        _add_common(p)

    args = parser.parse_args(argv)
    try:
        if args.command in commands:
            return commands[args.command](args)
        return _run_experiment_command(args, args.command)
    except ConfigValidationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # surfaced with a stable exit code
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
