"""Command-line front end: planning, maps, scans, simulation, experiments.

Every command prints exactly one JSON envelope on stdout; grid and
trajectory artifacts go to files named by --out flags.  Exit codes: 0
success, 2 input validation failure, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .baseline import SolverConfig, solve_six
from .core import CurrentSchedule, CurrentState, Pose, VehicleSpec
from .experiments import PROFILES, dynamic_monte_carlo, timing_bench
from .planner import ArcMode, PathSolution, plan
from .reachability import (
    cost_map,
    parametric_scan,
    reachability_map,
    write_scan_csv,
)
from .simulator import load_scenario, run_scenario
from .trajectory import cf_path, controls_of, integrate_if

SCHEMA_VERSION = "1"

EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


class ValidationError(Exception):
    pass


def _resolve_out(path: str | None) -> str | None:
    """Resolve relative artifact paths against DRIFTPLAN_OUT_DIR if set."""
    if path is None:
        return None
    base = os.environ.get("DRIFTPLAN_OUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(command: str, inputs: dict, results: dict) -> None:
    envelope = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
    }
    json.dump(envelope, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")


def _parse_triple(text: str, name: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValidationError(f"{name} must be x,y,theta")
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError:
        raise ValidationError(f"{name} must be numeric: got {text!r}")


def _parse_current(text: str, degrees: bool) -> CurrentState:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValidationError("current must be vw,thetaw")
    try:
        vw, thetaw = float(parts[0]), float(parts[1])
    except ValueError:
        raise ValidationError(f"current must be numeric: got {text!r}")
    if vw < 0:
        raise ValidationError("current speed must be non-negative")
    return CurrentState(vw, math.radians(thetaw) if degrees else thetaw)


def _angle_arg(args, name: str) -> float:
    """Resolve an angle flag with its _deg alternative."""
    rad = getattr(args, name)
    deg = getattr(args, f"{name}_deg")
    if rad is not None and deg is not None:
        raise ValidationError(f"--{name.replace('_', '-')} given twice (radians and degrees)")
    if deg is not None:
        return math.radians(deg)
    if rad is None:
        raise ValidationError(f"missing --{name.replace('_', '-')}")
    return rad


def _add_angle_flag(parser, name: str, help_text: str, required: bool = False):
    parser.add_argument(f"--{name}", type=float, default=None, dest=name.replace("-", "_"),
                        help=f"{help_text} (radians)")
    parser.add_argument(f"--{name}-deg", type=float, default=None,
                        dest=f"{name.replace('-', '_')}_deg",
                        help=f"{help_text} (degrees)")


def _solution_dict(sol: PathSolution) -> dict:
    return {
        "path_type": sol.path_type.value,
        "k": sol.k,
        "alpha": sol.alpha,
        "beta": sol.beta,
        "gamma": sol.gamma,
        "kappa": sol.kappa,
        "travel_time": sol.travel_time,
    }


def _vehicle_from(args) -> VehicleSpec:
    try:
        return VehicleSpec(args.speed, args.radius)
    except ValueError as exc:
        raise ValidationError(str(exc))


def cmd_plan(args) -> None:
    start = Pose(*_parse_triple(args.start, "--start"))
    goal = Pose(*_parse_triple(args.goal, "--goal"))
    current = _parse_current(args.current, args.current_deg)
    vehicle = _vehicle_from(args)
    if current.speed >= vehicle.speed:
        raise ValidationError("current speed must be less than vehicle speed")
    inputs = {
        "start": [start.x, start.y, start.theta],
        "goal": [goal.x, goal.y, goal.theta],
        "current": [current.speed, current.heading],
        "speed": vehicle.speed,
        "radius": vehicle.turning_radius,
        "mode": args.mode,
    }
    if args.mode == "dubins":
        solved = solve_six(start, goal, current, vehicle, SolverConfig(seed=args.seed))
        if solved is None:
            print("no six-type solution converged", file=sys.stderr)
            sys.exit(EXIT_RUNTIME)
        sol, elapsed = solved
        results = {"solution": _solution_dict(sol), "compute_time_seconds": elapsed}
    else:
        mode = ArcMode.TWO_PI if args.mode == "2pi" else ArcMode.FOUR_PI
        sol = plan(start, goal, current, vehicle, mode)
        if sol is None:
            results = {"solution": "unreachable"}
        else:
            results = {"solution": _solution_dict(sol)}
    traj_path = _resolve_out(args.traj)
    if traj_path and isinstance(results.get("solution"), dict):
        controls = controls_of(sol, vehicle)
        h = 1e-3 * vehicle.turning_radius / vehicle.speed
        traj = integrate_if(start, controls, CurrentSchedule.constant(current), vehicle, h)
        traj.write_csv(traj_path)
        results["trajectory_csv"] = traj_path
        cf = cf_path(sol, vehicle, start)
        cf_name = traj_path.replace(".csv", "") + "_cf.csv"
        cf.write_csv(cf_name)
        results["cf_trajectory_csv"] = cf_name
    _emit("plan", inputs, results)


def _grid_command(args, which: str) -> None:
    theta_f = _angle_arg(args, "theta_f")
    current = _parse_current(args.current, args.current_deg)
    vehicle = _vehicle_from(args)
    if current.speed >= vehicle.speed:
        raise ValidationError("current speed must be less than vehicle speed")
    mode = ArcMode.TWO_PI if args.mode == "2pi" else ArcMode.FOUR_PI
    bounds = None
    if args.bounds:
        parts = [float(p) for p in args.bounds.split(",")]
        if len(parts) != 4:
            raise ValidationError("--bounds must be xmin,xmax,ymin,ymax")
        bounds = tuple(parts)
    fn = reachability_map if which == "reachmap" else cost_map
    grid = fn(theta_f, current, bounds, args.step, mode, vehicle)
    out_path = _resolve_out(args.out)
    grid.write_csv(out_path)
    _emit(which, {
        "theta_f": theta_f,
        "current": [current.speed, current.heading],
        "mode": args.mode,
        "step": args.step,
    }, {
        "out": out_path,
        "cells": int(grid.dominant.size),
        "unreachable_cells": grid.unreachable_count(),
    })


def cmd_reachmap(args) -> None:
    _grid_command(args, "reachmap")


def cmd_costmap(args) -> None:
    _grid_command(args, "costmap")


def cmd_paramscan(args) -> None:
    vws = tuple(float(p) for p in args.vw.split(","))
    if any(not (0.0 < v < 1.0) for v in vws):
        raise ValidationError("scan current speeds must lie in (0, 1)")
    rows = parametric_scan(args.theta_f_step, args.theta_w_step, vws)
    out_path = _resolve_out(args.out)
    write_scan_csv(rows, out_path)
    reachable = sum(1 for r in rows if r[3])
    _emit("paramscan", {
        "theta_f_step": args.theta_f_step,
        "theta_w_step": args.theta_w_step,
        "vw": list(vws),
    }, {"out": out_path, "triples": len(rows), "reachable_triples": reachable})


def cmd_simulate(args) -> None:
    try:
        scenario = load_scenario(args.scenario)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ValidationError(f"bad scenario file: {exc}")
    result = run_scenario(scenario, args.seed)
    if args.traj:
        result.trajectory.write_csv(_resolve_out(args.traj))
    _emit("simulate", {"scenario": args.scenario, "seed": args.seed},
          result.summary_dict())


def cmd_montecarlo(args) -> None:
    if args.profile not in PROFILES:
        raise ValidationError(f"unknown profile {args.profile!r}")
    stats = dynamic_monte_carlo(PROFILES[args.profile], n_runs=args.runs, seed=args.seed)
    if args.out:
        stats.write_csv(_resolve_out(args.out))
    _emit("montecarlo", {
        "profile": args.profile, "runs": args.runs, "seed": args.seed,
    }, stats.summary_dict())


def cmd_bench(args) -> None:
    result = timing_bench(args.instances, args.seed)
    _emit("bench", {"instances": args.instances, "seed": args.seed}, {
        "mean_fourpi_seconds": result.mean_fourpi,
        "mean_baseline_seconds": result.mean_baseline,
        "ratio": result.ratio,
    })


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftplan",
        description="Minimum-time path planning for Dubins-type vehicles under currents",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="solve one start/goal instance")
    p.add_argument("--start", required=True, help="x,y,theta")
    p.add_argument("--goal", required=True, help="x,y,theta")
    p.add_argument("--current", required=True, help="vw,thetaw")
    p.add_argument("--current-deg", action="store_true",
                   help="interpret the current heading in degrees")
    p.add_argument("--speed", type=float, default=1.0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--mode", choices=("2pi", "4pi", "dubins"), default="4pi")
    p.add_argument("--traj", default=None, help="write sampled trajectories to CSV")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_plan)

    for name in ("reachmap", "costmap"):
        p = sub.add_parser(name, help=f"rasterize a {name} CSV grid")
        _add_angle_flag(p, "theta-f", "goal heading")
        p.add_argument("--current", required=True, help="vw,thetaw")
        p.add_argument("--current-deg", action="store_true")
        p.add_argument("--speed", type=float, default=1.0)
        p.add_argument("--radius", type=float, default=1.0)
        p.add_argument("--mode", choices=("2pi", "4pi"), default="2pi")
        p.add_argument("--bounds", default=None, help="xmin,xmax,ymin,ymax")
        p.add_argument("--step", type=float, default=None)
        p.add_argument("--out", required=True)
        p.set_defaults(func=cmd_reachmap if name == "reachmap" else cmd_costmap)

    p = sub.add_parser("paramscan", help="full-reachability parameter scan")
    p.add_argument("--theta-f-step", type=float, default=math.pi / 100)
    p.add_argument("--theta-w-step", type=float, default=math.pi / 100)
    p.add_argument("--vw", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
                   help="comma-separated current speeds in (0, 1)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_paramscan)

    p = sub.add_parser("simulate", help="run one mission from a scenario JSON file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--traj", default=None, help="write the flown trajectory to CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("montecarlo", help="paired dynamic-current study")
    p.add_argument("--profile", required=True, help="naval or aerial")
    p.add_argument("--runs", type=int, default=360)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="per-run CSV")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("bench", help="mean solve-time comparison")
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the validation code
        return int(exc.code or 0)
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as exc:
        return int(exc.code or 0)
    except Exception as exc:  # runtime failures map to exit 3
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
