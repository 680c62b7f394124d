"""Independent oracles used by the test suite.

Everything here is deliberately separate from the library's solution path:
classical no-wind Dubins closed forms, a brute-force bisection root finder,
and a batched RK4 endpoint integrator for bulk solver validation.
"""

from __future__ import annotations

import math

import numpy as np

from driftplan.core import TWO_PI
from driftplan.planner import PathSolution, PathType

_SEGMENT_SIGNS = {
    PathType.LSL: (1, 0, 1),
    PathType.RSR: (-1, 0, -1),
    PathType.LSR: (1, 0, -1),
    PathType.RSL: (-1, 0, 1),
    PathType.LRL: (1, -1, 1),
    PathType.RLR: (-1, 1, -1),
}


def _mod2pi(a: float) -> float:
    r = math.fmod(a, TWO_PI)
    if r < 0:
        r += TWO_PI
    return 0.0 if r >= TWO_PI else r


def _polar(x: float, y: float) -> tuple[float, float]:
    return math.hypot(x, y), math.atan2(y, x)


def _lsl(x: float, y: float, phi: float):
    p, t1 = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    t = _mod2pi(t1)
    q = _mod2pi(phi - t)
    return [(t, p, q)]


def _lsr(x: float, y: float, phi: float):
    u1, t1 = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if u1 * u1 < 4.0:
        return []
    p = math.sqrt(u1 * u1 - 4.0)
    t = _mod2pi(t1 + math.atan2(2.0, p))
    q = _mod2pi(t - phi)
    return [(t, p, q)]


def _lrl(x: float, y: float, phi: float):
    u1, t1 = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if u1 > 4.0:
        return []
    s_small = 2.0 * math.asin(u1 / 4.0)
    out = []
    for s in (s_small, TWO_PI - s_small):
        if s <= 0.0 or s >= TWO_PI:
            continue
        t = _mod2pi(t1 + 0.5 * s)
        q = _mod2pi(phi - t + s)
        out.append((t, s, q))
    return out


def classical_dubins_candidates(x: float, y: float, phi: float, r: float = 1.0):
    """All classical no-wind Dubins candidates from (0,0,0) to (x,y,phi).

    Returns (path_type, first, middle, last, length) tuples; middle is a
    straight length for CSC words and a middle-arc angle for CCC words,
    with arc angles in radians and lengths in the input units.
    """
    xn, yn = x / r, y / r
    raw: list[tuple[PathType, float, float, float]] = []
    for t, p, q in _lsl(xn, yn, phi):
        raw.append((PathType.LSL, t, p, q))
    for t, p, q in _lsl(xn, -yn, _mod2pi(-phi)):
        raw.append((PathType.RSR, t, p, q))
    for t, p, q in _lsr(xn, yn, phi):
        raw.append((PathType.LSR, t, p, q))
    for t, p, q in _lsr(xn, -yn, _mod2pi(-phi)):
        raw.append((PathType.RSL, t, p, q))
    for t, s, q in _lrl(xn, yn, phi):
        raw.append((PathType.LRL, t, s, q))
    for t, s, q in _lrl(xn, -yn, _mod2pi(-phi)):
        raw.append((PathType.RLR, t, s, q))
    out = []
    for path_type, a, mid, c in raw:
        if path_type in (PathType.LRL, PathType.RLR):
            length = r * (a + mid + c)
        else:
            length = r * (a + c) + r * mid
        out.append((path_type, a, mid, c, length))
    return out


def classical_dubins_shortest(x: float, y: float, phi: float, r: float = 1.0):
    """Shortest classical Dubins word and its length."""
    cands = classical_dubins_candidates(x, y, phi, r)
    return min(cands, key=lambda c: c[-1])


def bisect_root(fn, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Plain bisection for a sign-changing scalar function."""
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError("root not bracketed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0 or hi - lo < tol:
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def batch_endpoints_rk4(
    solutions: list[PathSolution],
    currents,
    speed: float = 1.0,
    turning_radius: float = 1.0,
    steps_per_segment: int = 1500,
) -> np.ndarray:
    """RK4 endpoints of many solutions integrated from the origin pose.

    currents is a list of (wx, wy) pairs, one per solution; all solutions
    run in lockstep, one segment at a time, each divided into the same
    number of steps with per-instance step sizes.  Returns (n, 3) poses.
    """
    n = len(solutions)
    wx = np.array([c[0] for c in currents])
    wy = np.array([c[1] for c in currents])
    r, v = turning_radius, speed
    u_max = v / r

    durations = np.zeros((n, 3))
    rates = np.zeros((n, 3))
    for i, sol in enumerate(solutions):
        s1, s2, s3 = _SEGMENT_SIGNS[sol.path_type]
        durations[i] = (r * sol.alpha / v, sol.beta / v, r * sol.gamma / v)
        rates[i] = (s1 * u_max, s2 * u_max, s3 * u_max)

    x = np.zeros(n)
    y = np.zeros(n)
    theta = np.zeros(n)
    for seg in range(3):
        h = durations[:, seg] / steps_per_segment
        u = rates[:, seg]
        for _ in range(steps_per_segment):
            th_mid = theta + 0.5 * h * u
            th_end = theta + h * u
            k1x = v * np.cos(theta) + wx
            k1y = v * np.sin(theta) + wy
            k2x = v * np.cos(th_mid) + wx
            k2y = v * np.sin(th_mid) + wy
            k4x = v * np.cos(th_end) + wx
            k4y = v * np.sin(th_end) + wy
            x = x + h / 6.0 * (k1x + 4.0 * k2x + k4x)
            y = y + h / 6.0 * (k1y + 4.0 * k2y + k4y)
            theta = th_end
    return np.stack([x, y, theta % TWO_PI], axis=1)
