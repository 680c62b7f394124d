"""Six-path-type minimum-time solver in the drift frame.

The comparison baseline: LSL and RSR come from the closed forms, while LSR,
RSL, LRL and RLR require numeric root finding of their interception
equations (the goal keeps drifting while the path plays out, so the travel
time enters the boundary conditions).  Roots are found by a seeded,
batched, damped-Newton multistart, which stands in for the generic
nonlinear solvers such planners traditionally rely on.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import TWO_PI, CurrentState, Pose, VehicleSpec, to_start_frame
from .planner import (
    LSL_K_CANDIDATES,
    PathSolution,
    PathType,
    RSR_K_CANDIDATES,
    solve_one,
)

HARD_TYPES = (PathType.LSR, PathType.RSL, PathType.LRL, PathType.RLR)

# Accept roots whose arc angles poke marginally outside [0, 2*pi).
_ARC_SLACK = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    """Multistart root-finder settings for the four transcendental types."""

    n_initial_guesses: int = 100
    residual_tolerance: float = 1e-10
    max_iterations: int = 25
    seed: int = 0

    def __post_init__(self):
        if self.n_initial_guesses < 1:
            raise ValueError("need at least one initial guess")


@dataclass(frozen=True)
class LatencyModel:
    """Synthetic planner compute delays used by the mission simulator."""

    dubins_six: float = 8.72
    analytic_4pi: float = 6.4e-4

    def __post_init__(self):
        if self.dubins_six < 0.0 or self.analytic_4pi < 0.0:
            raise ValueError("compute delays must be non-negative")

    def delay_for(self, planner: str) -> float:
        if planner == "dubins_six":
            return self.dubins_six
        if planner == "analytic_4pi":
            return self.analytic_4pi
        raise ValueError(f"unknown planner kind {planner!r}")


def _van_der_corput(n: int, base: int) -> float:
    q = 0.0
    bk = 1.0 / base
    while n > 0:
        n, rem = divmod(n, base)
        q += rem * bk
        bk /= base
    return q


def _low_discrepancy_starts(
    n: int, bounds: np.ndarray, seed: int
) -> np.ndarray:
    """Halton points with a seeded toroidal shift, scaled into bounds."""
    dims = bounds.shape[0]
    primes = (2, 3, 5, 7)[:dims]
    rng = np.random.default_rng(np.random.SeedSequence((seed, dims, n)))
    shift = rng.random(dims)
    pts = np.empty((n, dims))
    for d, p in enumerate(primes):
        col = np.array([_van_der_corput(i + 1, p) for i in range(n)])
        pts[:, d] = (col + shift[d]) % 1.0
    lo = bounds[:, 0]
    hi = bounds[:, 1]
    return lo + pts * (hi - lo)


def _batched_jacobian(residual_fn, x: np.ndarray) -> np.ndarray:
    n, d = x.shape
    jac = np.empty((n, d, d))
    for col in range(d):
        eps = 1e-7 * np.maximum(1.0, np.abs(x[:, col]))
        xp = x.copy()
        xm = x.copy()
        xp[:, col] += eps
        xm[:, col] -= eps
        jac[:, :, col] = (residual_fn(xp) - residual_fn(xm)) / (2.0 * eps)[:, None]
    return jac


def _batched_solve(jac: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve J dx = rhs per row with explicit 2x2/3x3 inverses.

    Rows with a near-singular Jacobian get a zero step and simply fail the
    convergence test later.
    """
    d = jac.shape[1]
    if d == 2:
        a, b = jac[:, 0, 0], jac[:, 0, 1]
        c, e = jac[:, 1, 0], jac[:, 1, 1]
        det = a * e - b * c
        ok = np.abs(det) > 1e-14
        det = np.where(ok, det, 1.0)
        dx = np.empty_like(rhs)
        dx[:, 0] = (e * rhs[:, 0] - b * rhs[:, 1]) / det
        dx[:, 1] = (-c * rhs[:, 0] + a * rhs[:, 1]) / det
        dx[~ok] = 0.0
        return dx
    det = np.linalg.det(jac)
    ok = np.abs(det) > 1e-14
    dx = np.zeros_like(rhs)
    if ok.any():
        dx[ok] = np.linalg.solve(jac[ok], rhs[ok][..., None])[..., 0]
    return dx


def multi_start_solve(
    residual_fn: Callable[[np.ndarray], np.ndarray],
    bounds: np.ndarray,
    cfg: SolverConfig,
) -> np.ndarray:
    """Deduplicated roots of a batched residual from low-discrepancy starts.

    residual_fn maps an (n, d) array of parameter rows to an (n, d) array of
    residual rows.  All starts iterate in lockstep with damped Newton steps;
    the returned root set is deterministic for a fixed config.
    """
    bounds = np.asarray(bounds, dtype=float)
    x = _low_discrepancy_starts(cfg.n_initial_guesses, bounds, cfg.seed)
    f = residual_fn(x)
    fnorm = np.abs(f).max(axis=1)
    # iterate only rows that are neither converged nor stalled
    active = fnorm > cfg.residual_tolerance
    for _ in range(cfg.max_iterations):
        if not active.any():
            break
        xa = x[active]
        fa = f[active]
        na = fnorm[active]
        jac = _batched_jacobian(residual_fn, xa)
        step = _batched_solve(jac, -fa)
        # cap absurd steps so one bad Jacobian cannot fling a start away
        norms = np.abs(step).max(axis=1)
        big = norms > 10.0
        if big.any():
            step[big] *= (10.0 / norms[big])[:, None]
        lam = np.ones(len(xa))
        accepted = np.zeros(len(xa), dtype=bool)
        new_x = xa.copy()
        new_f = fa.copy()
        new_norm = na.copy()
        for _ in range(6):
            todo = ~accepted
            trial = xa[todo] + lam[todo, None] * step[todo]
            ft = residual_fn(trial)
            fn = np.abs(ft).max(axis=1)
            improve = fn < na[todo]
            idx = np.flatnonzero(todo)[improve]
            new_x[idx] = trial[improve]
            new_f[idx] = ft[improve]
            new_norm[idx] = fn[improve]
            accepted[idx] = True
            if accepted.all():
                break
            lam = np.where(accepted, lam, lam * 0.5)
        x[active] = new_x
        f[active] = new_f
        fnorm[active] = new_norm
        still = accepted & (new_norm > cfg.residual_tolerance)
        active[np.flatnonzero(active)] = still  # drop converged and stalled rows
    converged = x[fnorm <= cfg.residual_tolerance]
    if len(converged) == 0:
        return converged.reshape(0, bounds.shape[0])
    order = np.lexsort(converged.T[::-1])
    converged = converged[order]
    kept: list[np.ndarray] = []
    for row in converged:
        if all(np.abs(row - other).max() > 1e-6 for other in kept):
            kept.append(row)
    return np.array(kept)


def _closure_offsets(path_type: PathType) -> tuple[float, tuple[int, ...]]:
    """Sign pattern and winding branches of the heading-closure identity."""
    if path_type is PathType.LSR:
        return +1.0, (0, 1)
    if path_type is PathType.RSL:
        return -1.0, (-1, 0)
    if path_type is PathType.LRL:
        return +1.0, (-1, 0, 1)
    if path_type is PathType.RLR:
        return -1.0, (0, 1, 2)
    raise ValueError(f"{path_type} has a closed-form solution; no residual needed")


def _gamma_csc(path_type: PathType, alpha, theta_f: float, m):
    # LSR: heading alpha - gamma = theta_f ; RSL: -alpha + gamma = theta_f
    if path_type is PathType.LSR:
        return alpha - theta_f + TWO_PI * m
    return alpha + theta_f + TWO_PI * m


def _gamma_ccc(path_type: PathType, alpha, delta, theta_f: float, m):
    # LRL: alpha - delta + gamma = theta_f ; RLR: -alpha + delta - gamma = theta_f
    if path_type is PathType.LRL:
        return theta_f - alpha + delta + TWO_PI * m
    return delta - alpha - theta_f + TWO_PI * m


def _csc_positions(path_type: PathType, alpha, beta, theta_f: float, r: float):
    sa, ca = np.sin(alpha), np.cos(alpha)
    sf, cf = math.sin(theta_f), math.cos(theta_f)
    if path_type is PathType.LSR:
        return (2 * r * sa + beta * ca - r * sf,
                r - 2 * r * ca + beta * sa + r * cf)
    return (2 * r * sa + beta * ca + r * sf,
            2 * r * ca - r - beta * sa - r * cf)


def _ccc_positions(path_type: PathType, alpha, delta, theta_f: float, r: float):
    sf, cf = math.sin(theta_f), math.cos(theta_f)
    if path_type is PathType.LRL:
        return (2 * r * np.sin(alpha) - 2 * r * np.sin(alpha - delta) + r * sf,
                r - 2 * r * np.cos(alpha) + 2 * r * np.cos(alpha - delta) - r * cf)
    return (2 * r * np.sin(alpha) + 2 * r * np.sin(delta - alpha) - r * sf,
            2 * r * np.cos(alpha) - r - 2 * r * np.cos(delta - alpha) + r * cf)


def _branch_residual(
    path_type: PathType,
    m: int,
    goal: Pose,
    current: CurrentState,
    r: float,
) -> Callable[[np.ndarray], np.ndarray]:
    """Smooth residual for one winding branch, normalized vehicle speed.

    CSC rows are (alpha, T); CCC rows are (alpha, delta, T).  The residual
    vanishes exactly when the path endpoint meets the goal displaced by the
    current drift over T.
    """
    wx, wy = current.wx, current.wy
    theta_f = goal.theta

    if path_type in (PathType.LSR, PathType.RSL):
        def fn(u: np.ndarray) -> np.ndarray:
            alpha, t = u[:, 0], u[:, 1]
            gamma = _gamma_csc(path_type, alpha, theta_f, m)
            beta = t - r * (alpha + gamma)
            px, py = _csc_positions(path_type, alpha, beta, theta_f, r)
            return np.stack(
                [px - (goal.x - wx * t), py - (goal.y - wy * t)], axis=1
            )
        return fn

    def fn(u: np.ndarray) -> np.ndarray:
        alpha, delta, t = u[:, 0], u[:, 1], u[:, 2]
        gamma = _gamma_ccc(path_type, alpha, delta, theta_f, m)
        px, py = _ccc_positions(path_type, alpha, delta, theta_f, r)
        return np.stack(
            [px - (goal.x - wx * t),
             py - (goal.y - wy * t),
             t - r * (alpha + delta + gamma)],
            axis=1,
        )
    return fn


def residual(
    path_type: PathType,
    unknowns,
    goal: Pose,
    current: CurrentState,
    vehicle: VehicleSpec,
) -> np.ndarray:
    """Interception residual for one of the four transcendental path types.

    unknowns is (alpha, T) for LSR/RSL or (alpha, arc2, T) for LRL/RLR, in
    normalized (unit-speed) units with the goal in the start frame; gamma is
    taken as the representative of the heading closure in [0, 2*pi).
    """
    u = np.atleast_2d(np.asarray(unknowns, dtype=float))
    scaled = CurrentState(current.speed / vehicle.speed, current.heading)
    r = vehicle.turning_radius
    theta_f = goal.theta
    if path_type in (PathType.LSR, PathType.RSL):
        raw = _gamma_csc(path_type, u[:, 0], theta_f, 0)
        m = -np.floor(raw / TWO_PI)  # representative in [0, 2*pi)
        out = np.empty((len(u), 2))
        for mm in np.unique(m):
            sel = m == mm
            out[sel] = _branch_residual(path_type, int(mm), goal, scaled, r)(u[sel])
        return out[0] if np.ndim(unknowns) == 1 else out
    raw = _gamma_ccc(path_type, u[:, 0], u[:, 1], theta_f, 0)
    m = -np.floor(raw / TWO_PI)
    out = np.empty((len(u), 3))
    for mm in np.unique(m):
        sel = m == mm
        out[sel] = _branch_residual(path_type, int(mm), goal, scaled, r)(u[sel])
    return out[0] if np.ndim(unknowns) == 1 else out


def _time_upper_bound(goal: Pose, vw: float, r: float) -> float:
    """Any minimum-time candidate finishes before this (net progress >= 1-vw)."""
    return (math.hypot(goal.x, goal.y) + 2 * TWO_PI * r) / (1.0 - vw)


def _roots_to_solutions(
    path_type: PathType,
    m: int,
    roots: np.ndarray,
    goal: Pose,
    r: float,
    t_bound: float,
) -> list[PathSolution]:
    """Filter branch-m roots down to geometrically valid path solutions."""
    sols = []
    theta_f = goal.theta
    for row in roots:
        if path_type in (PathType.LSR, PathType.RSL):
            alpha, t = row
            gamma = float(_gamma_csc(path_type, alpha, theta_f, m))
            beta = t - r * (alpha + gamma)
            if (-_ARC_SLACK <= alpha < TWO_PI + _ARC_SLACK
                    and -_ARC_SLACK <= gamma < TWO_PI + _ARC_SLACK
                    and beta >= -1e-9 and 0.0 < t <= t_bound + 1e-6):
                sols.append(PathSolution(
                    path_type, m, max(alpha, 0.0), max(beta, 0.0),
                    max(gamma, 0.0), TWO_PI, t,
                ))
        else:
            alpha, delta, t = row
            gamma = float(_gamma_ccc(path_type, alpha, delta, theta_f, m))
            if (-_ARC_SLACK <= alpha < TWO_PI + _ARC_SLACK
                    and _ARC_SLACK < delta < TWO_PI + _ARC_SLACK
                    and -_ARC_SLACK <= gamma < TWO_PI + _ARC_SLACK
                    and 0.0 < t <= t_bound + 1e-6
                    and abs(t - r * (alpha + delta + gamma)) <= 1e-6):
                sols.append(PathSolution(
                    path_type, m, max(alpha, 0.0), r * delta,
                    max(gamma, 0.0), TWO_PI, t,
                ))
    return sols


def solve_hard_type(
    path_type: PathType,
    goal: Pose,
    current: CurrentState,
    vehicle: VehicleSpec,
    cfg: SolverConfig,
) -> list[PathSolution]:
    """All multistart roots of one transcendental type, as path solutions.

    Goal in the start frame.  Travel times are rescaled to real seconds;
    for LRL/RLR the middle-arc length r*delta is stored in beta.
    """
    scaled = CurrentState(current.speed / vehicle.speed, current.heading)
    r = vehicle.turning_radius
    t_bound = _time_upper_bound(goal, scaled.speed, r)
    _, branches = _closure_offsets(path_type)
    dims = 2 if path_type in (PathType.LSR, PathType.RSL) else 3
    if dims == 2:
        bounds = np.array([[0.0, TWO_PI], [0.0, t_bound]])
    else:
        bounds = np.array([[0.0, TWO_PI], [0.0, TWO_PI], [0.0, t_bound]])
    out: list[PathSolution] = []
    for m in branches:
        fn = _branch_residual(path_type, m, goal, scaled, r)
        roots = multi_start_solve(fn, bounds, cfg)
        for sol in _roots_to_solutions(path_type, m, roots, goal, r, t_bound):
            out.append(
                PathSolution(sol.path_type, sol.k, sol.alpha, sol.beta,
                             sol.gamma, sol.kappa, sol.travel_time / vehicle.speed)
            )
    return out


def solve_six(
    start: Pose,
    goal: Pose,
    current: CurrentState,
    vehicle: VehicleSpec,
    cfg: SolverConfig = SolverConfig(),
    hard_types: tuple[PathType, ...] = HARD_TYPES,
) -> tuple[PathSolution, float] | None:
    """Minimum-time path over all six types plus the wall-clock solve time.

    LSL/RSR use the closed forms with classical 2*pi arcs; the other four
    are solved numerically.  hard_types can restrict the numeric set, e.g.
    to the two CSC types.  Returns None when nothing converges (possible
    only if the closed forms are infeasible and every multistart fails).
    """
    if current.speed >= vehicle.speed:
        raise ValueError("current speed must be less than vehicle speed")
    t0 = time.perf_counter()
    local_goal, local_current = to_start_frame(start, goal, current)
    best: PathSolution | None = None

    def consider(sol: PathSolution | None):
        nonlocal best
        if sol is not None and (best is None or sol.travel_time < best.travel_time - 1e-12):
            best = sol

    for path_type, ks in ((PathType.LSL, LSL_K_CANDIDATES), (PathType.RSR, RSR_K_CANDIDATES)):
        for k in ks:
            consider(solve_one(path_type, k, local_goal, local_current, vehicle, TWO_PI))
    for path_type in hard_types:
        for sol in solve_hard_type(path_type, local_goal, local_current, vehicle, cfg):
            consider(sol)
    elapsed = time.perf_counter() - t0
    if best is None:
        return None
    return best, elapsed
