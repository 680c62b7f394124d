"""Control schedules, kinematic integration, and sampled path rendering.

Integration doubles as the independent check on every closed-form solver:
running the planned controls through the vehicle kinematics must land on
the goal pose.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CurrentSchedule,
    CurrentState,
    Pose,
    VehicleSpec,
    angle_difference,
    current_at,
    normalize_angle,
)
from .planner import PathSolution, PathType

# Turn-direction signs (first, middle, last segment) per path type.
_SEGMENT_SIGNS = {
    PathType.LSL: (1, 0, 1),
    PathType.RSR: (-1, 0, -1),
    PathType.LSR: (1, 0, -1),
    PathType.RSL: (-1, 0, 1),
    PathType.LRL: (1, -1, 1),
    PathType.RLR: (-1, 1, -1),
}


@dataclass(frozen=True)
class ControlSegment:
    turn_rate: float
    duration: float


@dataclass(frozen=True)
class ControlSchedule:
    segments: tuple[ControlSegment, ...]

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.segments)


@dataclass(frozen=True)
class SampledTrajectory:
    """Columnar (t, x, y, theta) samples in either frame.

    Times are strictly increasing from 0 and the first sample is the start
    pose; frame is "inertial" or "current".
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    frame: str

    def end_pose(self) -> Pose:
        return Pose(float(self.x[-1]), float(self.y[-1]), float(self.theta[-1]))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "x", "y", "theta", "frame"])
            for i in range(len(self.t)):
                writer.writerow(
                    [repr(float(self.t[i])), repr(float(self.x[i])),
                     repr(float(self.y[i])), repr(float(self.theta[i])), self.frame]
                )


def controls_of(sol: PathSolution, vehicle: VehicleSpec) -> ControlSchedule:
    """Three-segment turn-rate schedule realizing a solution.

    Arc segments run at +/-max turn rate for r*angle/v seconds; the middle
    segment lasts beta/v seconds (straight for CSC, opposite-turn arc for
    CCC, for which beta already stores the arc length).
    """
    u = vehicle.max_turn_rate
    v = vehicle.speed
    r = vehicle.turning_radius
    s1, s2, s3 = _SEGMENT_SIGNS[sol.path_type]
    return ControlSchedule((
        ControlSegment(s1 * u, r * sol.alpha / v),
        ControlSegment(s2 * u, sol.beta / v),
        ControlSegment(s3 * u, r * sol.gamma / v),
    ))


def _step_exact(x, y, theta, u, wx, wy, v, h):
    """Advance one step with the closed-form constant-turn-rate update."""
    if u == 0.0:
        return (x + (v * math.cos(theta) + wx) * h,
                y + (v * math.sin(theta) + wy) * h,
                theta)
    theta1 = theta + u * h
    return (x + (v / u) * (math.sin(theta1) - math.sin(theta)) + wx * h,
            y - (v / u) * (math.cos(theta1) - math.cos(theta)) + wy * h,
            theta1)


def _step_rk4(x, y, theta, u, wx, wy, v, h):
    """Classic fourth-order step; the heading component integrates exactly."""
    def deriv(th):
        return v * math.cos(th) + wx, v * math.sin(th) + wy

    k1x, k1y = deriv(theta)
    k2x, k2y = deriv(theta + 0.5 * h * u)
    k3x, k3y = k2x, k2y
    k4x, k4y = deriv(theta + h * u)
    return (x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x),
            y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y),
            theta + u * h)


def _breakpoints(controls: ControlSchedule, schedule: CurrentSchedule) -> list[float]:
    """Sorted times where the control or the current changes."""
    total = controls.total_duration
    cuts = {0.0, total}
    acc = 0.0
    for seg in controls.segments:
        acc += seg.duration
        cuts.add(min(acc, total))
    for t in schedule.change_times():
        if 0.0 < t < total:
            cuts.add(t)
    return sorted(cuts)


def integrate_if(
    start: Pose,
    controls: ControlSchedule,
    schedule: CurrentSchedule,
    vehicle: VehicleSpec,
    h: float,
    method: str = "exact",
) -> SampledTrajectory:
    """Integrate the drift kinematics in the inertial frame.

    Steps never straddle a control-segment boundary or a current change.
    method "exact" uses closed-form constant-turn updates (no curvature
    drift on long arcs); "rk4" uses the classic fourth-order step and is the
    reference oracle with O(h^4) position error.
    """
    if h <= 0.0:
        raise ValueError("step size must be positive")
    if method not in ("exact", "rk4"):
        raise ValueError(f"unknown integration method {method!r}")
    step = _step_exact if method == "exact" else _step_rk4

    v = vehicle.speed
    seg_ends = []
    acc = 0.0
    for seg in controls.segments:
        acc += seg.duration
        seg_ends.append(acc)

    def turn_rate_at(t: float) -> float:
        for end, seg in zip(seg_ends, controls.segments):
            if t < end:
                return seg.turn_rate
        return controls.segments[-1].turn_rate if controls.segments else 0.0

    ts = [0.0]
    xs = [start.x]
    ys = [start.y]
    thetas = [start.theta]
    x, y, theta = start.x, start.y, start.theta
    cuts = _breakpoints(controls, schedule)
    for t0, t1 in zip(cuts, cuts[1:]):
        span = t1 - t0
        if span <= 0.0:
            continue
        u = turn_rate_at(0.5 * (t0 + t1))
        cur = current_at(schedule, t0)
        n = max(1, math.ceil(span / h))
        dt = span / n
        for i in range(n):
            x, y, theta = step(x, y, theta, u, cur.wx, cur.wy, v, dt)
            ts.append(t0 + (i + 1) * dt)
            xs.append(x)
            ys.append(y)
            thetas.append(normalize_angle(theta))
        theta = normalize_angle(theta)
    return SampledTrajectory(
        np.asarray(ts), np.asarray(xs), np.asarray(ys), np.asarray(thetas), "inertial"
    )


def cf_path(
    sol: PathSolution,
    vehicle: VehicleSpec,
    start: Pose = Pose(0.0, 0.0, 0.0),
    h: float | None = None,
) -> SampledTrajectory:
    """Closed-form arc-line-arc samples in the drift frame.

    No integration: each sample comes from exact circle/line geometry, so
    the endpoint equals the goal displaced by -w*T when the solution is
    valid.
    """
    if h is None:
        h = 1e-3 * vehicle.turning_radius / vehicle.speed
    controls = controls_of(sol, vehicle)
    v = vehicle.speed
    ts = [0.0]
    xs = [start.x]
    ys = [start.y]
    thetas = [start.theta]
    t0 = 0.0
    x0, y0, th0 = start.x, start.y, start.theta
    for seg in controls.segments:
        if seg.duration <= 0.0:
            t0 += seg.duration
            continue
        n = max(1, math.ceil(seg.duration / h))
        for i in range(1, n + 1):
            dt = seg.duration * i / n
            if seg.turn_rate == 0.0:
                x = x0 + v * math.cos(th0) * dt
                y = y0 + v * math.sin(th0) * dt
                th = th0
            else:
                th = th0 + seg.turn_rate * dt
                x = x0 + (v / seg.turn_rate) * (math.sin(th) - math.sin(th0))
                y = y0 - (v / seg.turn_rate) * (math.cos(th) - math.cos(th0))
            ts.append(t0 + dt)
            xs.append(x)
            ys.append(y)
            thetas.append(normalize_angle(th))
        t0 += seg.duration
        x0, y0 = xs[-1], ys[-1]
        th0 = th0 + seg.turn_rate * seg.duration
    return SampledTrajectory(
        np.asarray(ts), np.asarray(xs), np.asarray(ys), np.asarray(thetas), "current"
    )


def endpoint_residual(
    sol: PathSolution,
    goal: Pose,
    current: CurrentState,
    vehicle: VehicleSpec,
) -> tuple[float, float]:
    """Algebraic defect of a solution against its boundary conditions.

    Returns (position residual in meters, heading residual in radians) from
    substituting the parameters into the drift-frame interception equations;
    goal in the start frame.
    """
    r = vehicle.turning_radius
    t = sol.travel_time
    xf = goal.x - current.wx * t
    yf = goal.y - current.wy * t
    if sol.path_type is PathType.LSL:
        ex = r * math.sin(goal.theta) + sol.beta * math.cos(sol.alpha)
        ey = r * (1.0 - math.cos(goal.theta)) + sol.beta * math.sin(sol.alpha)
        heading = normalize_angle(sol.alpha + sol.gamma)
    elif sol.path_type is PathType.RSR:
        ex = -r * math.sin(goal.theta) + sol.beta * math.cos(sol.alpha)
        ey = -r * (1.0 - math.cos(goal.theta)) - sol.beta * math.sin(sol.alpha)
        heading = normalize_angle(-(sol.alpha + sol.gamma))
    else:
        raise ValueError("algebraic residuals are defined for LSL and RSR only")
    return math.hypot(xf - ex, yf - ey), angle_difference(heading, goal.theta)
