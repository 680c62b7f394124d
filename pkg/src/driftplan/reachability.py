"""Reachable-region geometry for 2*pi-arc LSL/RSR paths.

For a fixed first-arc angle the reachable goal positions form a ray from a
fixed rotation center; sweeping the arc angle rotates the ray (ccw for LSL,
cw for RSR), so each (path type, winding index) yields an angular sector.
This module builds those sectors, classifies the major/minor one per path
type, evaluates the closed-form full-coverage predicates, and rasterizes
reachability and travel-time grids.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core import TWO_PI, CurrentState, Pose, VehicleSpec, normalize_angle
from .planner import (
    ArcMode,
    LSL_K_CANDIDATES,
    PathType,
    RSR_K_CANDIDATES,
    feasible_range,
    solve_one,
)

# Angular tolerance for closed-interval membership and full-circle detection.
ANGLE_TOL = 1e-12

FULL_REACH_CASES = ("1.1", "1.2", "2.1", "2.2", "3.1", "3.2", "4.1", "4.2")


@dataclass(frozen=True)
class RegionDescriptor:
    """One swept sector: center, boundary ray rotations, and sweep sense."""

    path_type: PathType
    k: int
    center: tuple[float, float]
    omega_start: float
    omega_end: float
    sweep: str  # "ccw" for LSL, "cw" for RSR
    covers_full_circle: bool


@dataclass(frozen=True)
class ReachCell:
    x_f: float
    y_f: float
    dominant: str  # "LSL", "RSR", or "unreachable"
    travel_time: float | None


@dataclass(frozen=True)
class ReachGrid:
    """Rasterized reachability/cost data over a goal-position grid."""

    xs: np.ndarray
    ys: np.ndarray
    dominant: np.ndarray  # shape (len(ys), len(xs)) of "LSL"/"RSR"/"unreachable"
    travel_time: np.ndarray  # same shape; NaN where unreachable

    def cell(self, i: int, j: int) -> ReachCell:
        t = float(self.travel_time[j, i])
        return ReachCell(
            float(self.xs[i]), float(self.ys[j]), str(self.dominant[j, i]),
            None if math.isnan(t) else t,
        )

    def unreachable_count(self) -> int:
        return int((self.dominant == "unreachable").sum())

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "dominant", "T"])
            for j in range(len(self.ys)):
                for i in range(len(self.xs)):
                    t = self.travel_time[j, i]
                    writer.writerow([
                        repr(float(self.xs[i])), repr(float(self.ys[j])),
                        str(self.dominant[j, i]),
                        "" if math.isnan(t) else repr(float(t)),
                    ])


@dataclass(frozen=True)
class FullReachability:
    """Outcome of the closed-form 2*pi coverage predicates."""

    satisfied_cases: frozenset[str]
    fully_reachable: bool
    degenerate: bool = False


def center(
    path_type: PathType, k: int, theta_f: float, current: CurrentState, r: float
) -> tuple[float, float]:
    """Rotation center of the reachability ray for one (path type, k)."""
    turn = TWO_PI * k + theta_f
    if path_type is PathType.LSL:
        return (
            r * math.sin(theta_f) + current.wx * r * turn,
            r * (1.0 - math.cos(theta_f)) + current.wy * r * turn,
        )
    if path_type is PathType.RSR:
        return (
            -r * math.sin(theta_f) - current.wx * r * turn,
            -r * (1.0 - math.cos(theta_f)) - current.wy * r * turn,
        )
    raise ValueError("reachability rays are defined for LSL and RSR only")


def omega(path_type: PathType, alpha: float, current: CurrentState) -> float:
    """Rotation of the reachability ray at first-arc angle alpha, in [0, 2*pi).

    Independent of the winding index; strictly ccw in alpha for LSL and cw
    for RSR whenever the current is slower than the vehicle.
    """
    if path_type is PathType.LSL:
        return normalize_angle(
            math.atan2(math.sin(alpha) + current.wy, math.cos(alpha) + current.wx)
        )
    if path_type is PathType.RSR:
        return normalize_angle(
            math.atan2(-math.sin(alpha) + current.wy, math.cos(alpha) + current.wx)
        )
    raise ValueError("reachability rays are defined for LSL and RSR only")


def opposite(delta: float) -> float:
    """Rotation of a ray direction by pi, normalized to [0, 2*pi)."""
    return normalize_angle(delta + math.pi)


def _ccw_offset(start: float, x: float) -> float:
    """Counterclockwise angle from start to x, in [0, 2*pi)."""
    return normalize_angle(x - start)


def _in_ccw_interval(start: float, end: float, x: float, tol: float = ANGLE_TOL) -> bool:
    """Whether x lies in the closed ccw interval from start to end."""
    span = _ccw_offset(start, end)
    off = _ccw_offset(start, x)
    return off <= span + tol or off >= TWO_PI - tol


def region_span(
    path_type: PathType,
    k: int,
    theta_f: float,
    current: CurrentState,
    r: float,
    kappa: float,
) -> RegionDescriptor:
    """Sector swept by the reachability ray over the feasible alpha range."""
    interval = feasible_range(path_type, k, theta_f, kappa)
    sweep = "ccw" if path_type is PathType.LSL else "cw"
    full = (interval.upper - interval.lower) >= TWO_PI - ANGLE_TOL
    return RegionDescriptor(
        path_type,
        k,
        center(path_type, k, theta_f, current, r),
        omega(path_type, interval.lower, current),
        omega(path_type, interval.upper, current),
        sweep,
        full,
    )


def sweep_extent(region: RegionDescriptor) -> float:
    """Unwrapped angular width of a sector, in [0, 2*pi]."""
    if region.covers_full_circle:
        return TWO_PI
    if region.sweep == "ccw":
        return _ccw_offset(region.omega_start, region.omega_end)
    return _ccw_offset(region.omega_end, region.omega_start)


def contains(region: RegionDescriptor, point: tuple[float, float]) -> bool:
    """Whether a goal position lies inside a swept sector.

    The sector apex itself is always contained (zero-length straight
    segment).  Boundary rays are treated as inclusive.
    """
    if region.covers_full_circle:
        return True
    px, py = region.center
    dx = point[0] - px
    dy = point[1] - py
    if math.hypot(dx, dy) <= ANGLE_TOL:
        return True
    direction = normalize_angle(math.atan2(dy, dx))
    if region.sweep == "ccw":
        return _in_ccw_interval(region.omega_start, region.omega_end, direction)
    return _in_ccw_interval(region.omega_end, region.omega_start, direction)


def classify_major_minor(
    path_type: PathType, theta_f: float, current: CurrentState, r: float
) -> tuple[int, int]:
    """Winding indices of the larger and smaller 2*pi sector of a path type.

    Ties (isolated theta_f values) resolve toward k=0 for LSL and k=-1 for
    RSR for determinism.
    """
    ks = LSL_K_CANDIDATES if path_type is PathType.LSL else RSR_K_CANDIDATES
    extents = [
        sweep_extent(region_span(path_type, k, theta_f, current, r, TWO_PI))
        for k in ks
    ]
    if extents[0] >= extents[1]:
        return ks[0], ks[1]
    return ks[1], ks[0]


def phi(case: str, theta_f: float, current: CurrentState, r: float) -> float:
    """Rotation of the segment joining the major and minor sector centers.

    Closed forms per predicate case; cases 1.x/2.x are undefined for zero
    current (the centers coincide along the current direction).
    """
    wx, wy = current.wx, current.wy
    if case in ("1.1", "2.1"):
        if wx == 0.0 and wy == 0.0:
            raise ValueError("phi is degenerate for zero current in cases 1 and 2")
        return normalize_angle(math.atan2(wy, wx))
    if case in ("1.2", "2.2"):
        if wx == 0.0 and wy == 0.0:
            raise ValueError("phi is degenerate for zero current in cases 1 and 2")
        return normalize_angle(math.atan2(-wy, -wx))
    if case in ("3.1", "3.2"):
        return normalize_angle(math.atan2(
            math.cos(theta_f) - 1.0 + wy * (math.pi - theta_f),
            -math.sin(theta_f) + wx * (math.pi - theta_f),
        ))
    if case in ("4.1", "4.2"):
        return normalize_angle(math.atan2(
            1.0 - math.cos(theta_f) - wy * (math.pi - theta_f),
            math.sin(theta_f) - wx * (math.pi - theta_f),
        ))
    raise ValueError(f"unknown case {case!r}")


# Per case: path type owning the major sector and the winding index the case
# presumes for it.
_CASE_MAJOR = {
    "1.1": (PathType.LSL, 0),
    "1.2": (PathType.LSL, 1),
    "2.1": (PathType.RSR, -1),
    "2.2": (PathType.RSR, -2),
    "3.1": (PathType.LSL, 0),
    "3.2": (PathType.LSL, 1),
    "4.1": (PathType.RSR, -1),
    "4.2": (PathType.RSR, -2),
}


def _shadow_interval(region: RegionDescriptor) -> tuple[float, float]:
    """Ccw interval of directions whose sector placement covers the gap.

    The gap of a major sector (the directions it misses) spans at most pi;
    rotating its boundaries by pi gives the cone in which the complementary
    sector's center must lie to cover that gap.
    """
    if region.sweep == "ccw":
        return opposite(region.omega_end), opposite(region.omega_start)
    return opposite(region.omega_start), opposite(region.omega_end)


def full_reachability_2pi(
    theta_f: float, current: CurrentState, r: float
) -> FullReachability:
    """Evaluate the eight coverage predicates for 2*pi-arc LSL/RSR paths.

    A case is satisfied when its presumed major sector matches the actual
    one and the center-joining rotation phi falls inside the major sector's
    pi-rotated gap; any satisfied case means every goal position is
    reachable.  Zero current is reported degenerate and fully reachable.
    """
    if current.speed == 0.0:
        return FullReachability(frozenset(), True, degenerate=True)
    majors = {
        PathType.LSL: classify_major_minor(PathType.LSL, theta_f, current, r)[0],
        PathType.RSR: classify_major_minor(PathType.RSR, theta_f, current, r)[0],
    }
    satisfied = set()
    for case in FULL_REACH_CASES:
        path_type, k = _CASE_MAJOR[case]
        if majors[path_type] != k:
            continue
        region = region_span(path_type, k, theta_f, current, r, TWO_PI)
        if sweep_extent(region) >= TWO_PI - ANGLE_TOL:
            satisfied.add(case)
            continue
        start, end = _shadow_interval(region)
        if _in_ccw_interval(start, end, phi(case, theta_f, current, r)):
            satisfied.add(case)
    return FullReachability(frozenset(satisfied), bool(satisfied))


def major_region_containment(
    theta_f: float, current: CurrentState, r: float
) -> tuple[bool, bool]:
    """Which path type's major sector fully covers the other's.

    Exactly one flag is true.  At measure-zero degeneracies the mutual
    relation breaks down (both sectors full circles at theta_f = 0, or
    opposite-facing half-planes at exact extent ties, where neither covers
    the other); those resolve deterministically to the LSL side.
    """
    lsl_major = classify_major_minor(PathType.LSL, theta_f, current, r)[0]
    rsr_major = classify_major_minor(PathType.RSR, theta_f, current, r)[0]
    lsl = region_span(PathType.LSL, lsl_major, theta_f, current, r, TWO_PI)
    rsr = region_span(PathType.RSR, rsr_major, theta_f, current, r, TWO_PI)

    def covers(big: RegionDescriptor, small: RegionDescriptor) -> bool:
        if sweep_extent(big) >= TWO_PI - ANGLE_TOL:
            return True
        dx = small.center[0] - big.center[0]
        dy = small.center[1] - big.center[1]
        if math.hypot(dx, dy) <= ANGLE_TOL:
            return True
        start, end = _shadow_interval(big)
        return _in_ccw_interval(start, end, normalize_angle(math.atan2(dy, dx)))

    lsl_covers = covers(lsl, rsr)
    rsr_covers = covers(rsr, lsl)
    if lsl_covers == rsr_covers:
        return True, False
    return lsl_covers, rsr_covers


def parametric_scan(
    theta_f_step: float = math.pi / 100,
    theta_w_step: float = math.pi / 100,
    v_w_values: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
    r: float = 1.0,
) -> list[tuple[float, float, float, bool]]:
    """Sweep (theta_f, theta_w, v_w) and record where full coverage holds."""
    if theta_f_step <= 0.0 or theta_w_step <= 0.0:
        raise ValueError("scan steps must be positive")
    rows = []
    n_f = int(math.ceil(TWO_PI / theta_f_step - ANGLE_TOL))
    n_w = int(math.ceil(TWO_PI / theta_w_step - ANGLE_TOL))
    for vw in v_w_values:
        for i in range(n_f):
            theta_f = i * theta_f_step
            for j in range(n_w):
                theta_w = j * theta_w_step
                res = full_reachability_2pi(theta_f, CurrentState(vw, theta_w), r)
                rows.append((theta_f, theta_w, vw, res.fully_reachable))
    return rows


def write_scan_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta_f", "theta_w", "v_w", "reachable"])
        for theta_f, theta_w, vw, ok in rows:
            writer.writerow([repr(theta_f), repr(theta_w), repr(vw), int(ok)])


def reachability_map(
    theta_f: float,
    current: CurrentState,
    bounds: tuple[float, float, float, float] | None = None,
    step: float | None = None,
    mode: ArcMode | str = ArcMode.TWO_PI,
    vehicle: VehicleSpec = VehicleSpec(),
) -> ReachGrid:
    """Per-cell dominant path type and travel time over a goal grid.

    Each cell solves both path types in the given arc mode; the dominant
    label is the faster feasible one, "unreachable" if neither solves.
    Default bounds are [-10r, 10r]^2 with step 0.1r.
    """
    mode = ArcMode(mode)
    r = vehicle.turning_radius
    if bounds is None:
        bounds = (-10.0 * r, 10.0 * r, -10.0 * r, 10.0 * r)
    if step is None:
        step = 0.1 * r
    if step <= 0.0:
        raise ValueError("grid step must be positive")
    x_min, x_max, y_min, y_max = bounds
    xs = np.arange(x_min, x_max + 0.5 * step, step)
    ys = np.arange(y_min, y_max + 0.5 * step, step)
    dominant = np.full((len(ys), len(xs)), "unreachable", dtype=object)
    times = np.full((len(ys), len(xs)), np.nan)
    for j, gy in enumerate(ys):
        for i, gx in enumerate(xs):
            goal = Pose(float(gx), float(gy), theta_f)
            best_type = None
            best_t = math.inf
            for path_type, ks in (
                (PathType.LSL, LSL_K_CANDIDATES),
                (PathType.RSR, RSR_K_CANDIDATES),
            ):
                for k in ks:
                    sol = solve_one(path_type, k, goal, current, vehicle, mode.kappa)
                    if sol is not None and sol.travel_time < best_t - 1e-12:
                        best_t = sol.travel_time
                        best_type = path_type
            if best_type is not None:
                dominant[j, i] = best_type.value
                times[j, i] = best_t
    return ReachGrid(xs, ys, dominant, times)


def cost_map(
    theta_f: float,
    current: CurrentState,
    bounds: tuple[float, float, float, float] | None = None,
    step: float | None = None,
    mode: ArcMode | str = ArcMode.TWO_PI,
    vehicle: VehicleSpec = VehicleSpec(),
) -> ReachGrid:
    """Travel-time grid of the dominant path type (same raster as the map)."""
    return reachability_map(theta_f, current, bounds, step, mode, vehicle)
