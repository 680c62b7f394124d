"""Closed-form minimum-time LSL/RSR paths in a drift frame.

Planning happens in the frame that translates with the current: there the
vehicle flies ordinary arc-line-arc geometry while the goal drifts at the
opposite of the current velocity, so interception reduces to a small set of
closed-form candidates indexed by a winding index k.  Arc angles may be
capped at 2*pi (classical) or extended to 4*pi, which restores full
reachability and often shortens the interception time.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import (
    FOUR_PI,
    TWO_PI,
    CurrentState,
    Pose,
    VehicleSpec,
    normalize_angle,
    to_start_frame,
)

# Winding indices searched per path type; larger |k| never improves the time.
LSL_K_CANDIDATES = (0, 1)
RSR_K_CANDIDATES = (-1, -2)
LSL_K_EXTENDED = (0, 1, 2, 3)
RSR_K_EXTENDED = (-1, -2, -3, -4)

# Absolute angular slack absorbing atan2 rounding at interval endpoints.
RANGE_SLACK = 1e-9


class PathType(str, enum.Enum):
    LSL = "LSL"
    RSR = "RSR"
    LSR = "LSR"
    RSL = "RSL"
    LRL = "LRL"
    RLR = "RLR"


class ArcMode(str, enum.Enum):
    """Arc-range cap selector: classical 2*pi arcs or extended 4*pi arcs."""

    TWO_PI = "two_pi"
    FOUR_PI = "four_pi"

    @property
    def kappa(self) -> float:
        return TWO_PI if self is ArcMode.TWO_PI else FOUR_PI


@dataclass(frozen=True)
class PathSolution:
    """One arc-line-arc solution.

    alpha and gamma are the first/last arc angles in radians, beta the
    middle-segment length in meters (straight length for CSC paths, middle
    arc length r*angle for CCC paths so the time formula is uniform), k the
    winding index of the heading-closure constraint, kappa the arc-range cap
    the solution was produced under, and travel_time the time in seconds.
    """

    path_type: PathType
    k: int
    alpha: float
    beta: float
    gamma: float
    kappa: float
    travel_time: float

    def arc_sum(self) -> float:
        return self.alpha + self.gamma


@dataclass(frozen=True)
class ParamInterval:
    """Feasible interval for the arc angles at a given (path type, k, kappa)."""

    lower: float
    upper: float
    lower_closed: bool
    upper_closed: bool

    def contains(self, x: float, slack: float = RANGE_SLACK) -> bool:
        if self.lower_closed:
            if x < self.lower - slack:
                return False
        elif x <= self.lower + slack:
            return False
        if self.upper_closed:
            if x > self.upper + slack:
                return False
        elif x >= self.upper - slack:
            return False
        return True


def feasible_range(
    path_type: PathType, k: int, theta_f: float, kappa: float
) -> ParamInterval:
    """Feasible alpha/gamma interval for one (path type, k, kappa) row.

    Both arc angles share the interval, and its endpoints always sum to the
    total turn alpha + gamma fixed by k and theta_f.
    """
    if kappa == TWO_PI:
        rows = {
            (PathType.LSL, 0): ParamInterval(0.0, theta_f, True, True),
            (PathType.LSL, 1): ParamInterval(theta_f, TWO_PI, False, False),
            (PathType.RSR, -1): ParamInterval(0.0, TWO_PI - theta_f, True, True),
            (PathType.RSR, -2): ParamInterval(TWO_PI - theta_f, TWO_PI, False, False),
        }
    elif kappa == FOUR_PI:
        rows = {
            (PathType.LSL, 0): ParamInterval(0.0, theta_f, True, True),
            (PathType.LSL, 1): ParamInterval(0.0, TWO_PI + theta_f, True, True),
            (PathType.LSL, 2): ParamInterval(theta_f, FOUR_PI, False, False),
            (PathType.LSL, 3): ParamInterval(TWO_PI + theta_f, FOUR_PI, False, False),
            (PathType.RSR, -1): ParamInterval(0.0, TWO_PI - theta_f, True, True),
            (PathType.RSR, -2): ParamInterval(0.0, FOUR_PI - theta_f, True, True),
            (PathType.RSR, -3): ParamInterval(TWO_PI - theta_f, FOUR_PI, False, False),
            (PathType.RSR, -4): ParamInterval(FOUR_PI - theta_f, FOUR_PI, False, False),
        }
    else:
        raise ValueError(f"kappa must be 2*pi or 4*pi, got {kappa!r}")
    try:
        return rows[(path_type, k)]
    except KeyError:
        raise ValueError(f"no feasible-range row for {path_type} k={k} kappa={kappa}")


def coeffs_lsl(
    k: int, goal: Pose, current: CurrentState, r: float
) -> tuple[float, float]:
    """Constants (A, B) of the LSL interception equations for winding index k."""
    turn = TWO_PI * k + goal.theta
    a = goal.x - r * math.sin(goal.theta) - current.wx * r * turn
    b = goal.y - r * (1.0 - math.cos(goal.theta)) - current.wy * r * turn
    return a, b


def coeffs_rsr(
    k: int, goal: Pose, current: CurrentState, r: float
) -> tuple[float, float]:
    """Constants (A, B) of the RSR interception equations for winding index k."""
    turn = TWO_PI * k + goal.theta
    a = goal.x + r * math.sin(goal.theta) + current.wx * r * turn
    b = goal.y + r * (1.0 - math.cos(goal.theta)) + current.wy * r * turn
    return a, b


def solve_beta(a: float, b: float, current: CurrentState) -> float:
    """Non-negative root of (1-vw^2) b^2 + 2(A wx + B wy) b - (A^2+B^2) = 0.

    The root product is -(A^2+B^2)/(1-vw^2) <= 0, so for current speed below
    the (normalized) vehicle speed the positive branch always exists.
    """
    vw = current.speed
    if vw >= 1.0:
        raise ValueError("current speed must be below the normalized vehicle speed")
    dot = a * current.wx + b * current.wy
    disc = dot * dot + (a * a + b * b) * (1.0 - vw * vw)
    return (math.sqrt(disc) - dot) / (1.0 - vw * vw)


def _solution_residual(
    path_type: PathType,
    alpha: float,
    beta: float,
    goal: Pose,
    current: CurrentState,
    r: float,
    travel_time: float,
) -> float:
    """Position defect of the interception equations (normalized speed)."""
    xf = goal.x - current.wx * travel_time
    yf = goal.y - current.wy * travel_time
    if path_type is PathType.LSL:
        ex = r * math.sin(goal.theta) + beta * math.cos(alpha)
        ey = r * (1.0 - math.cos(goal.theta)) + beta * math.sin(alpha)
    else:
        ex = -r * math.sin(goal.theta) + beta * math.cos(alpha)
        ey = -r * (1.0 - math.cos(goal.theta)) - beta * math.sin(alpha)
    return math.hypot(xf - ex, yf - ey)


def _solve_normalized(
    path_type: PathType,
    k: int,
    goal: Pose,
    current: CurrentState,
    r: float,
    kappa: float,
) -> PathSolution | None:
    """Solve one (path type, k) candidate with unit vehicle speed."""
    interval = feasible_range(path_type, k, goal.theta, kappa)
    if path_type is PathType.LSL:
        a, b = coeffs_lsl(k, goal, current, r)
        arc_sum = TWO_PI * k + goal.theta
    else:
        a, b = coeffs_rsr(k, goal, current, r)
        arc_sum = -(TWO_PI * k + goal.theta)
    if arc_sum < 0.0:
        return None
    beta = solve_beta(a, b, current)
    if beta < 0.0:
        return None

    scale = max(1.0, abs(goal.x), abs(goal.y))
    if beta <= 1e-9 * scale:
        # Goal at the rotation center: the arc split is free, so take the
        # symmetric one, which is interior for every feasible-range row.
        alpha = 0.5 * arc_sum
        if not interval.contains(alpha):
            return None
        travel = r * arc_sum + beta
        return PathSolution(path_type, k, alpha, beta, arc_sum - alpha, kappa, travel)

    if path_type is PathType.LSL:
        base = normalize_angle(math.atan2(b - beta * current.wy, a - beta * current.wx))
    else:
        base = normalize_angle(math.atan2(-b + beta * current.wy, a - beta * current.wx))

    # atan2 pins alpha only modulo 2*pi; enumerate in-range representatives
    # (smallest first for determinism) and close gamma exactly against the
    # winding constraint.
    reps = int(kappa / TWO_PI) + 1
    for j in range(reps):
        alpha = base + TWO_PI * j
        if not interval.contains(alpha):
            continue
        gamma = arc_sum - alpha
        if -RANGE_SLACK < gamma < 0.0:
            gamma = 0.0
        if gamma < 0.0 or not interval.contains(gamma):
            continue
        travel = r * arc_sum + beta
        if _solution_residual(path_type, alpha, beta, goal, current, r, travel) > 1e-9 * scale:
            continue
        return PathSolution(path_type, k, alpha, beta, gamma, kappa, travel)
    return None


def _normalize_problem(
    current: CurrentState, vehicle: VehicleSpec
) -> tuple[CurrentState, float]:
    """Scale the current by 1/v so the closed forms run at unit speed."""
    if current.speed >= vehicle.speed:
        raise ValueError("current speed must be less than vehicle speed")
    return CurrentState(current.speed / vehicle.speed, current.heading), vehicle.speed


def solve_one(
    path_type: PathType,
    k: int,
    goal: Pose,
    current: CurrentState,
    vehicle: VehicleSpec,
    kappa: float,
) -> PathSolution | None:
    """Closed-form solution for one (path type, winding index) candidate.

    The goal must be expressed in the start frame.  Returns None when no
    (alpha, beta, gamma) satisfies the interception equations inside the
    feasible ranges.
    """
    if path_type not in (PathType.LSL, PathType.RSR):
        raise ValueError("closed forms exist only for LSL and RSR")
    scaled, v = _normalize_problem(current, vehicle)
    sol = _solve_normalized(path_type, k, goal, scaled, vehicle.turning_radius, kappa)
    if sol is None:
        return None
    return PathSolution(
        sol.path_type, sol.k, sol.alpha, sol.beta, sol.gamma, sol.kappa,
        sol.travel_time / v,
    )


def plan(
    start: Pose,
    goal: Pose,
    current: CurrentState,
    vehicle: VehicleSpec,
    mode: ArcMode | str = ArcMode.FOUR_PI,
) -> PathSolution | None:
    """Minimum-time LSL/RSR path from start to goal under a steady current.

    Searches k in {0, 1} for LSL and {-1, -2} for RSR, which suffices for
    the minimum in both arc modes.  Ties break LSL before RSR, then smaller
    |k|.  four_pi mode always returns a solution for current slower than the
    vehicle; two_pi mode may return None.
    """
    mode = ArcMode(mode)
    local_goal, local_current = to_start_frame(start, goal, current)
    best: PathSolution | None = None
    for path_type, ks in ((PathType.LSL, LSL_K_CANDIDATES), (PathType.RSR, RSR_K_CANDIDATES)):
        for k in ks:
            sol = solve_one(path_type, k, local_goal, local_current, vehicle, mode.kappa)
            if sol is None:
                continue
            if best is None or sol.travel_time < best.travel_time - 1e-12:
                best = sol
    return best


def travel_time(sol: PathSolution, vehicle: VehicleSpec) -> float:
    """Travel time (r*(alpha+gamma) + beta) / v of a solution."""
    return (vehicle.turning_radius * (sol.alpha + sol.gamma) + sol.beta) / vehicle.speed


def extended_k_solutions(
    path_type: PathType,
    goal: Pose,
    current: CurrentState,
    vehicle: VehicleSpec,
) -> list[PathSolution]:
    """All existing 4*pi-arc solutions over the extended winding range.

    Covers k in {0..3} for LSL and {-1..-4} for RSR; exposed for checking
    that times increase with |k| and that the search never needs the larger
    indices.
    """
    ks = LSL_K_EXTENDED if path_type is PathType.LSL else RSR_K_EXTENDED
    out = []
    for k in ks:
        sol = solve_one(path_type, k, goal, current, vehicle, FOUR_PI)
        if sol is not None:
            out.append(sol)
    return out
