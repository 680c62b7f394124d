"""Mission execution under time-varying currents with noisy replanning.

A run executes the current plan open-loop and succeeds the moment it is
inside the goal's precision circle with an acceptable heading.  When the
current changes, the reaction depends on the planner's compute cost: the
closed-form planner replans at once from an instantaneous reading and
again when the windowed estimate is ready, while the slow six-type
baseline flies its stale controls through the estimation window and
replans once on the refined estimate.  While a replan computes, the
vehicle drifts along the net velocity; the baseline therefore plans from
a predicted post-drift pose.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .baseline import LatencyModel, SolverConfig, solve_six
from .core import (
    CurrentSchedule,
    CurrentState,
    Pose,
    VehicleSpec,
    angle_difference,
    current_at,
    normalize_angle,
)
from .planner import ArcMode, plan
from .trajectory import ControlSchedule, SampledTrajectory, controls_of

PLANNER_KINDS = ("analytic_4pi", "dubins_six")

# Fixed ids deriving one independent RNG stream per noise channel.
_CHANNELS = {"process": 0, "gps": 1, "compass": 2, "vw": 3, "thetaw": 4}

_DEFAULT_PROCESS_HEADINGS = tuple(m * math.pi / 6 for m in range(12))
_DEFAULT_PROCESS_PERIODS = (30.0, 45.0, 60.0)


@dataclass(frozen=True)
class NoiseModel:
    """Additive white Gaussian sensor noise parameters."""

    sigma_position: float = 0.0
    sigma_heading: float = 0.0
    sigma_vw_relative: float = 0.0
    sigma_thetaw: float = 0.0
    sample_rate: float = 1.0

    def __post_init__(self):
        for name in ("sigma_position", "sigma_heading", "sigma_vw_relative", "sigma_thetaw"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")
        if self.sample_rate <= 0.0:
            raise ValueError("sample rate must be positive")

    @staticmethod
    def zero() -> "NoiseModel":
        return NoiseModel()


@dataclass(frozen=True)
class RandomCurrentProcess:
    """Current that re-draws its heading after random hold periods."""

    initial: CurrentState
    headings: tuple[float, ...] = _DEFAULT_PROCESS_HEADINGS
    periods: tuple[float, ...] = _DEFAULT_PROCESS_PERIODS


@dataclass(frozen=True)
class Scenario:
    """Everything one simulated mission needs.

    initial_compute_latency False starts the mission with a plan already in
    hand (only replans cost compute time); True charges the first plan's
    compute time too, with the vehicle holding at the deployment point
    while the planner runs.  Replans always happen in-water: the vehicle
    drifts along the net velocity for the compute duration.
    """

    start: Pose
    goal: Pose
    vehicle: VehicleSpec
    current_process: CurrentSchedule | RandomCurrentProcess
    noise: NoiseModel = NoiseModel.zero()
    precision_radius: float = 1.0
    heading_tolerance: float = math.radians(5.0)
    t_max: float = 1000.0
    estimation_window: float = 12.0
    latency: LatencyModel = LatencyModel()
    planner: str = "analytic_4pi"
    initial_compute_latency: bool = False

    def __post_init__(self):
        if self.precision_radius <= 0.0:
            raise ValueError("precision radius must be positive")
        if self.planner not in PLANNER_KINDS:
            raise ValueError(f"planner must be one of {PLANNER_KINDS}")
        if self.t_max <= 0.0:
            raise ValueError("t_max must be positive")
        if self.estimation_window < 0.0:
            raise ValueError("estimation window must be non-negative")


@dataclass(frozen=True)
class DriftSegment:
    t: float
    from_pose: Pose
    to_pose: Pose

    @property
    def length(self) -> float:
        return math.hypot(self.to_pose.x - self.from_pose.x,
                          self.to_pose.y - self.from_pose.y)


@dataclass(frozen=True)
class RunResult:
    converged: bool
    total_time: float
    replan_count: int
    drift_segments: tuple[DriftSegment, ...]
    trajectory: SampledTrajectory
    compute_delays: tuple[float, ...]

    def summary_dict(self) -> dict:
        return {
            "converged": self.converged,
            "total_time": self.total_time,
            "replan_count": self.replan_count,
            "compute_delays": list(self.compute_delays),
            "drift_segments": [
                {
                    "t": seg.t,
                    "from": [seg.from_pose.x, seg.from_pose.y, seg.from_pose.theta],
                    "to": [seg.to_pose.x, seg.to_pose.y, seg.to_pose.theta],
                    "length": seg.length,
                }
                for seg in self.drift_segments
            ],
            "final_pose": [
                float(self.trajectory.x[-1]),
                float(self.trajectory.y[-1]),
                float(self.trajectory.theta[-1]),
            ],
        }


def estimate_heading_mle(samples) -> float:
    """Mean direction of noisy heading readings (circular-mean estimator)."""
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one heading sample")
    s = sum(math.sin(a) for a in samples)
    c = sum(math.cos(a) for a in samples)
    return normalize_angle(math.atan2(s, c))


def drift_predict(
    pose: Pose, heading: float, current: CurrentState, dt: float, vehicle: VehicleSpec
) -> Pose:
    """Pose after drifting along the net velocity for dt, heading unchanged."""
    if dt < 0.0:
        raise ValueError("drift duration must be non-negative")
    vx = vehicle.speed * math.cos(heading) + current.wx
    vy = vehicle.speed * math.sin(heading) + current.wy
    return Pose(pose.x + dt * vx, pose.y + dt * vy, pose.theta)


def check_termination(
    pose: Pose, goal: Pose, precision_radius: float, heading_tolerance: float
) -> bool:
    """Inside the goal's precision circle (inclusive) with acceptable heading."""
    dist = math.hypot(pose.x - goal.x, pose.y - goal.y)
    return (dist <= precision_radius
            and angle_difference(pose.theta, goal.theta) <= heading_tolerance)


def realize_schedule(
    process: CurrentSchedule | RandomCurrentProcess,
    horizon: float,
    rng: np.random.Generator,
) -> CurrentSchedule:
    """Materialize the current history over [0, horizon]."""
    if isinstance(process, CurrentSchedule):
        return process
    entries = [(0.0, process.initial)]
    t = 0.0
    while True:
        t += float(rng.choice(process.periods))
        if t > horizon:
            break
        heading = float(rng.choice(process.headings))
        entries.append((t, CurrentState(process.initial.speed, heading)))
    return CurrentSchedule(tuple(entries))


class _Recorder:
    """Accumulates (t, pose) samples, thinning to a minimum spacing."""

    def __init__(self, start: Pose, spacing: float, enabled: bool):
        self.ts = [0.0]
        self.xs = [start.x]
        self.ys = [start.y]
        self.thetas = [start.theta]
        self.spacing = spacing
        self.enabled = enabled

    def add(self, t: float, pose: Pose, force: bool = False):
        if not force and (not self.enabled or t - self.ts[-1] < self.spacing):
            return
        if t <= self.ts[-1]:
            return
        self.ts.append(t)
        self.xs.append(pose.x)
        self.ys.append(pose.y)
        self.thetas.append(pose.theta)

    def trajectory(self) -> SampledTrajectory:
        return SampledTrajectory(
            np.asarray(self.ts), np.asarray(self.xs),
            np.asarray(self.ys), np.asarray(self.thetas), "inertial",
        )


def _advance(pose: Pose, u: float, current: CurrentState, v: float, dt: float) -> Pose:
    """Exact constant-control update of the drift kinematics."""
    if u == 0.0:
        return Pose(pose.x + (v * math.cos(pose.theta) + current.wx) * dt,
                    pose.y + (v * math.sin(pose.theta) + current.wy) * dt,
                    pose.theta)
    theta1 = pose.theta + u * dt
    return Pose(
        pose.x + (v / u) * (math.sin(theta1) - math.sin(pose.theta)) + current.wx * dt,
        pose.y - (v / u) * (math.cos(theta1) - math.cos(pose.theta)) + current.wy * dt,
        theta1,
    )


class _Mission:
    """Mutable state of one run; drives the replan/execute event loop."""

    def __init__(self, scenario: Scenario, seed: int, run_index: int,
                 record_trajectory: bool, solver_cfg: SolverConfig):
        self.sc = scenario
        self.seed = seed
        self.run_index = run_index
        self.rngs = {
            name: np.random.default_rng(np.random.SeedSequence((seed, run_index, cid)))
            for name, cid in _CHANNELS.items()
        }
        self.schedule = realize_schedule(
            scenario.current_process, scenario.t_max, self.rngs["process"]
        )
        self.solver_cfg = solver_cfg
        self.t = 0.0
        self.pose = scenario.start
        self.plan_controls: ControlSchedule | None = None
        self.plan_elapsed = 0.0
        # the deployment pose is surveyed, but the initial current is known
        # only through one instantaneous (noisy) reading
        self.believed = self._measure_current(0.0)
        self.drift_segments: list[DriftSegment] = []
        self.compute_delays: list[float] = []
        self.replans = -1  # first planner call is the initial plan
        self.handled_epochs = 0
        self.converged = False
        # pending estimate refinement for the fast planner: (due time, epoch)
        self.refine_at: tuple[float, float] | None = None
        spacing = 0.05 * scenario.vehicle.turning_radius / scenario.vehicle.speed
        self.recorder = _Recorder(scenario.start, spacing, record_trajectory)

    # --- sensing -----------------------------------------------------------

    def _noisy_pose(self) -> Pose:
        n = self.sc.noise
        gps = self.rngs["gps"]
        compass = self.rngs["compass"]
        return Pose(
            self.pose.x + (gps.normal(0.0, n.sigma_position) if n.sigma_position else 0.0),
            self.pose.y + (gps.normal(0.0, n.sigma_position) if n.sigma_position else 0.0),
            self.pose.theta + (compass.normal(0.0, n.sigma_heading) if n.sigma_heading else 0.0),
        )

    def _measure_current(self, t: float) -> CurrentState:
        true = current_at(self.schedule, t)
        n = self.sc.noise
        vw = true.speed
        if n.sigma_vw_relative:
            vw += self.rngs["vw"].normal(0.0, n.sigma_vw_relative * true.speed)
        heading = true.heading
        if n.sigma_thetaw:
            heading += self.rngs["thetaw"].normal(0.0, n.sigma_thetaw)
        return self._clamped_current(vw, heading)

    def _clamped_current(self, vw: float, heading: float) -> CurrentState:
        vw = min(max(vw, 0.0), 0.99 * self.sc.vehicle.speed)
        return CurrentState(vw, normalize_angle(heading))

    # --- motion ------------------------------------------------------------

    def _next_epoch(self, t: float) -> float:
        for tc in self.schedule.change_times():
            if tc > t + 1e-12:
                return tc
        return math.inf

    def _next_unhandled_epoch(self) -> float:
        times = self.schedule.change_times()
        if self.handled_epochs < len(times):
            return times[self.handled_epochs]
        return math.inf

    def _epoch_pending(self) -> bool:
        return self._next_unhandled_epoch() <= self.t + 1e-9

    def _mark_epochs_handled(self) -> None:
        times = self.schedule.change_times()
        while (self.handled_epochs < len(times)
               and times[self.handled_epochs] <= self.t + 1e-9):
            self.handled_epochs += 1

    def _control_at(self, plan_time: float) -> float:
        if self.plan_controls is None or not self.plan_controls.segments:
            return 0.0
        acc = 0.0
        for seg in self.plan_controls.segments:
            acc += seg.duration
            if plan_time < acc - 1e-12:
                return seg.turn_rate
        # plan exhausted mid-window: loiter on the final arc rather than
        # fly off on a straight escape course
        last = self.plan_controls.segments[-1].turn_rate
        return last if last != 0.0 else self.sc.vehicle.max_turn_rate

    def _segment_cuts(self, t_stop: float) -> list[float]:
        cuts = {t_stop}
        if self.plan_controls is not None:
            acc = 0.0
            for seg in self.plan_controls.segments:
                acc += seg.duration
                t_abs = self.t + (acc - self.plan_elapsed)
                if self.t < t_abs < t_stop:
                    cuts.add(t_abs)
        tc = self._next_epoch(self.t)
        while tc < t_stop:
            cuts.add(tc)
            tc = self._next_epoch(tc)
        return sorted(cuts)

    def _run_controls_until(self, t_stop: float):
        """Fly the current plan (or loiter) up to t_stop.

        Arrival is monitored continuously: the mission succeeds the moment
        the vehicle is inside the precision circle with an acceptable
        heading, whether or not the plan has finished.
        """
        sc = self.sc
        v = sc.vehicle.speed
        for cut in self._segment_cuts(t_stop):
            while self.t < cut - 1e-12:
                u = self._control_at(self.plan_elapsed + 1e-12)
                cur = current_at(self.schedule, self.t)
                dt = min(cut - self.t, self.recorder.spacing)
                self.pose = _advance(self.pose, u, cur, v, dt)
                self.t += dt
                self.plan_elapsed += dt
                self.recorder.add(self.t, self.pose)
                if check_termination(self.pose, sc.goal, sc.precision_radius,
                                     sc.heading_tolerance):
                    self.converged = True
                    return

    # --- planning ----------------------------------------------------------

    def _invoke_planner(self, initial: bool):
        """Plan from the measured pose; returns (solution, synthetic delay).

        The initial plan starts from the exact deployment pose; replans use
        the noisy measured pose, and the slow planner then plans from the
        predicted post-drift pose (the fast one replans in place).
        """
        sc = self.sc
        delay = sc.latency.delay_for(sc.planner)
        measured = self.pose if initial else self._noisy_pose()
        if sc.planner == "dubins_six":
            origin = measured if initial else drift_predict(
                measured, measured.theta, self.believed, delay, sc.vehicle
            )
            cfg = replace(
                self.solver_cfg,
                seed=hash((self.seed, self.run_index, self.replans + 1)) % (2**32),
            )
            solved = solve_six(origin, sc.goal, self.believed, sc.vehicle, cfg)
            sol = solved[0] if solved is not None else None
        else:
            sol = plan(measured, sc.goal, self.believed, sc.vehicle, ArcMode.FOUR_PI)
        return sol, delay

    def _drift_through(self, duration: float):
        """Drift along the net velocity (heading frozen) across epochs."""
        start_pose = self.pose
        start_t = self.t
        t_end = min(self.t + duration, self.sc.t_max)
        while self.t < t_end - 1e-12:
            cur = current_at(self.schedule, self.t)
            chunk = min(t_end, self._next_epoch(self.t)) - self.t
            self.pose = drift_predict(self.pose, self.pose.theta, cur, chunk, self.sc.vehicle)
            self.t += chunk
            self.recorder.add(self.t, self.pose)
        if duration > 0.0:
            self.drift_segments.append(DriftSegment(start_t, start_pose, self.pose))

    def _window_estimate(self, t_from: float, window: float) -> CurrentState:
        """Circular-mean MLE from samples over (t_from, t_from + window]."""
        sc = self.sc
        heading_samples = []
        speed_samples = []
        n_samples = int(math.floor(window * sc.noise.sample_rate))
        for i in range(1, n_samples + 1):
            m = self._measure_current(min(t_from + i / sc.noise.sample_rate, sc.t_max))
            heading_samples.append(m.heading)
            speed_samples.append(m.speed)
        if not heading_samples:
            m = self._measure_current(min(t_from + window, sc.t_max))
            heading_samples.append(m.heading)
            speed_samples.append(m.speed)
        return self._clamped_current(
            sum(speed_samples) / len(speed_samples),
            estimate_heading_mle(heading_samples),
        )

    def _hold_and_estimate(self):
        """Fly the stale plan for the estimation window, then adopt the MLE."""
        sc = self.sc
        window = min(sc.estimation_window, sc.t_max - self.t)
        t0 = self.t
        self._run_controls_until(t0 + window)
        if self.converged:
            return
        self.believed = self._window_estimate(t0, window)

    # --- event loop ---------------------------------------------------------

    def _replan_now(self) -> bool:
        """One planner invocation with its latency; True if a plan is armed."""
        sc = self.sc
        initial = self.replans < 0
        sol, delay = self._invoke_planner(initial)
        self.replans += 1
        if initial:
            if sc.initial_compute_latency:
                # station-kept at deployment while the first plan runs
                self.compute_delays.append(delay)
                self.t = min(self.t + delay, sc.t_max)
                self.recorder.add(self.t, self.pose)
        else:
            self.compute_delays.append(delay)
            self._drift_through(delay)
        if sol is None:
            return False
        self.plan_controls = controls_of(sol, sc.vehicle)
        self.plan_elapsed = 0.0
        return True

    def _handle_change(self):
        """React to a current change, in a planner-appropriate way.

        The fast planner replans at once from an instantaneous reading and
        again when the windowed estimate is ready; the slow planner cannot
        afford two compute drifts, so it flies its stale plan through the
        estimation window and replans once on the refined estimate.
        """
        sc = self.sc
        epoch = self._next_unhandled_epoch()
        if sc.planner == "analytic_4pi":
            self.believed = self._measure_current(min(self.t, sc.t_max))
            self._mark_epochs_handled()
            if sc.estimation_window > 0.0:
                self.refine_at = (epoch + sc.estimation_window, epoch)
        else:
            self._hold_and_estimate()
            self._mark_epochs_handled()

    def run(self) -> RunResult:
        sc = self.sc
        need_plan = True
        while not self.converged and self.t < sc.t_max - 1e-9:
            if need_plan or self._epoch_pending():
                if self._epoch_pending():
                    self.refine_at = None
                    self._handle_change()
                    if self.converged or self.t >= sc.t_max - 1e-9:
                        break
                need_plan = not self._replan_now()
                continue  # re-check for epochs that arrived during the drift
            remaining = self.plan_controls.total_duration - self.plan_elapsed
            plan_end = self.t + max(remaining, 0.0)
            refine_due = self.refine_at[0] if self.refine_at else math.inf
            t_stop = min(plan_end, self._next_unhandled_epoch(), refine_due, sc.t_max)
            self._run_controls_until(t_stop)
            if self.converged:
                break
            if self.refine_at and self.t >= self.refine_at[0] - 1e-9:
                due, epoch = self.refine_at
                self.refine_at = None
                if not self._epoch_pending():
                    self.believed = self._window_estimate(epoch, due - epoch)
                    need_plan = True
                continue
            if abs(self.t - plan_end) <= 1e-9:
                need_plan = True
        self.recorder.add(self.t, self.pose, force=True)
        total = min(self.t, sc.t_max)
        return RunResult(
            converged=self.converged,
            total_time=total,
            replan_count=max(self.replans, 0),
            drift_segments=tuple(self.drift_segments),
            trajectory=self.recorder.trajectory(),
            compute_delays=tuple(self.compute_delays),
        )


def run_scenario(
    scenario: Scenario,
    seed: int,
    run_index: int = 0,
    record_trajectory: bool = True,
    solver_cfg: SolverConfig = SolverConfig(),
) -> RunResult:
    """Simulate one mission; bit-reproducible for a fixed (scenario, seed)."""
    mission = _Mission(scenario, seed, run_index, record_trajectory, solver_cfg)
    return mission.run()


# --- scenario (de)serialization ---------------------------------------------


def _angle_from(d: dict, key: str, default: float | None = None) -> float:
    """Read an angle field, accepting a *_deg variant converted exactly."""
    if key in d and f"{key}_deg" in d:
        raise ValueError(f"give either {key} or {key}_deg, not both")
    if key in d:
        return float(d[key])
    if f"{key}_deg" in d:
        return math.radians(float(d[f"{key}_deg"]))
    if default is None:
        raise ValueError(f"missing angle field {key}")
    return default


def _pose_from(d: dict) -> Pose:
    return Pose(float(d["x"]), float(d["y"]), _angle_from(d, "theta"))


def scenario_from_dict(d: dict) -> Scenario:
    """Build a Scenario from its JSON document form."""
    vehicle = VehicleSpec(float(d["vehicle"]["speed"]),
                          float(d["vehicle"]["turning_radius"]))
    if "current_schedule" in d:
        entries = tuple(
            (float(e["t_start"]), CurrentState(float(e["speed"]), _angle_from(e, "heading")))
            for e in d["current_schedule"]
        )
        process: CurrentSchedule | RandomCurrentProcess = CurrentSchedule(entries)
    elif "current_process" in d:
        p = d["current_process"]
        initial = CurrentState(float(p["speed"]), _angle_from(p, "heading", 0.0))
        headings = tuple(
            math.radians(h) for h in p["headings_deg"]
        ) if "headings_deg" in p else tuple(
            float(h) for h in p.get("headings", _DEFAULT_PROCESS_HEADINGS)
        )
        periods = tuple(float(x) for x in p.get("periods", _DEFAULT_PROCESS_PERIODS))
        process = RandomCurrentProcess(initial, headings, periods)
    else:
        raise ValueError("scenario needs current_schedule or current_process")
    noise_d = d.get("noise", {})
    noise = NoiseModel(
        sigma_position=float(noise_d.get("sigma_position", 0.0)),
        sigma_heading=_angle_from(noise_d, "sigma_heading", 0.0),
        sigma_vw_relative=float(noise_d.get("sigma_vw_relative", 0.0)),
        sigma_thetaw=_angle_from(noise_d, "sigma_thetaw", 0.0),
        sample_rate=float(noise_d.get("sample_rate", 1.0)),
    )
    latency_d = d.get("latency", {})
    latency = LatencyModel(
        dubins_six=float(latency_d.get("dubins_six", 8.72)),
        analytic_4pi=float(latency_d.get("analytic_4pi", 6.4e-4)),
    )
    return Scenario(
        start=_pose_from(d["start"]),
        goal=_pose_from(d["goal"]),
        vehicle=vehicle,
        current_process=process,
        noise=noise,
        precision_radius=float(d.get("precision_radius", 1.0)),
        heading_tolerance=_angle_from(d, "heading_tolerance", math.radians(5.0)),
        t_max=float(d.get("t_max", 1000.0)),
        estimation_window=float(d.get("estimation_window", 12.0)),
        latency=latency,
        planner=d.get("planner", "analytic_4pi"),
    )


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))
