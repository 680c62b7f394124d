"""Shared domain types, angle arithmetic, and current-schedule evaluation."""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


def normalize_angle(a: float) -> float:
    """Reduce an angle to the canonical range [0, 2*pi)."""
    if not math.isfinite(a):
        raise ValueError(f"angle must be finite, got {a!r}")
    r = math.fmod(a, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:  # fmod rounding can land exactly on 2*pi
        r = 0.0
    return r


def mod_kappa(a: float, kappa: float) -> float:
    """Reduce an angle modulo the arc-range cap kappa (2*pi or 4*pi)."""
    if not (kappa == TWO_PI or kappa == FOUR_PI):
        raise ValueError(f"kappa must be 2*pi or 4*pi, got {kappa!r}")
    if not math.isfinite(a):
        raise ValueError(f"angle must be finite, got {a!r}")
    r = math.fmod(a, kappa)
    if r < 0.0:
        r += kappa
    if r >= kappa:
        r = 0.0
    return r


def angle_difference(a: float, b: float) -> float:
    """Minimal circular distance between two angles, in [0, pi]."""
    d = math.fmod(a - b, TWO_PI)
    if d < 0.0:
        d += TWO_PI
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class Pose:
    """Planar position plus heading; theta is normalized to [0, 2*pi)."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass(frozen=True)
class VehicleSpec:
    """Constant-speed vehicle with a minimum turning radius."""

    speed: float = 1.0
    turning_radius: float = 1.0

    def __post_init__(self):
        if self.speed <= 0.0:
            raise ValueError("vehicle speed must be positive")
        if self.turning_radius <= 0.0:
            raise ValueError("turning radius must be positive")

    @property
    def max_turn_rate(self) -> float:
        return self.speed / self.turning_radius


@dataclass(frozen=True)
class CurrentState:
    """Uniform current given by speed and heading; heading normalized."""

    speed: float
    heading: float

    def __post_init__(self):
        if self.speed < 0.0:
            raise ValueError("current speed must be non-negative")
        object.__setattr__(self, "heading", normalize_angle(self.heading))

    @property
    def wx(self) -> float:
        return self.speed * math.cos(self.heading)

    @property
    def wy(self) -> float:
        return self.speed * math.sin(self.heading)


ZERO_CURRENT = CurrentState(0.0, 0.0)


@dataclass(frozen=True)
class CurrentSchedule:
    """Piecewise-constant-in-time current: ordered (t_start, state) entries.

    The first entry must start at t = 0 and start times must be strictly
    increasing.  Evaluation is right-continuous: the state beginning exactly
    at t applies at t.
    """

    entries: tuple[tuple[float, CurrentState], ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("schedule must contain at least one entry")
        entries = tuple((float(t), s) for t, s in self.entries)
        if entries[0][0] != 0.0:
            raise ValueError("first schedule entry must start at t = 0")
        for (t0, _), (t1, _) in zip(entries, entries[1:]):
            if t1 <= t0:
                raise ValueError("schedule start times must be strictly increasing")
        object.__setattr__(self, "entries", entries)

    @staticmethod
    def constant(state: CurrentState) -> "CurrentSchedule":
        return CurrentSchedule(((0.0, state),))

    def change_times(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.entries[1:])


def current_at(schedule: CurrentSchedule, t: float) -> CurrentState:
    """Current state in effect at time t (right-continuous lookup)."""
    if t < 0.0:
        raise ValueError("time must be non-negative")
    starts = [entry[0] for entry in schedule.entries]
    idx = bisect_right(starts, t) - 1
    return schedule.entries[idx][1]


def to_start_frame(
    start: Pose, goal: Pose, current: CurrentState
) -> tuple[Pose, CurrentState]:
    """Express goal and current in the frame where start is (0, 0, 0).

    Translates by -(start.x, start.y) and rotates by -start.theta; the
    current heading rotates with the frame while its speed is unchanged.
    """
    dx = goal.x - start.x
    dy = goal.y - start.y
    c = math.cos(start.theta)
    s = math.sin(start.theta)
    local = Pose(c * dx + s * dy, -s * dx + c * dy, goal.theta - start.theta)
    local_current = CurrentState(current.speed, current.heading - start.theta)
    return local, local_current


def from_start_frame(start: Pose, pose: Pose) -> Pose:
    """Inverse of to_start_frame for poses: map a start-frame pose to the world."""
    c = math.cos(start.theta)
    s = math.sin(start.theta)
    return Pose(
        start.x + c * pose.x - s * pose.y,
        start.y + s * pose.x + c * pose.y,
        pose.theta + start.theta,
    )
