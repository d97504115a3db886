"""Wall trajectories R(t) with analytic derivatives.

Trajectories are static outside [t_start, t_end]; the factories clamp the
law accordingly so solvers can extract asymptotic quantities at any time
past t_end. Velocities must stay subluminal (|Rdot| < 1) for the conformal
solver to be well posed; the factories enforce it at construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "WallTrajectory",
    "static_wall",
    "harmonic_wall",
    "quintic_wall",
    "tabulated_wall",
    "reversed_trajectory",
    "quintic_ramp",
    "quintic_ramp_dot",
]


@dataclass(frozen=True)
class WallTrajectory:
    """Wall position/velocity/acceleration as vectorized callables of time."""

    position: Callable
    velocity: Callable
    acceleration: Callable
    t_start: float
    t_end: float
    label: str = "custom"

    def __post_init__(self):
        if not self.t_end >= self.t_start:
            raise ValueError("t_end must be >= t_start")

    def max_speed(self, samples=4096):
        t = np.linspace(self.t_start, self.t_end, samples)
        return float(np.max(np.abs(self.velocity(t)))) if samples else 0.0


def _check_speed(traj, where):
    v = traj.max_speed()
    if v >= 1.0:
        raise ValueError(
            f"{where}: wall speed reaches |Rdot| = {v:.3g} >= 1 (superluminal)"
        )
    return traj


def static_wall(R0):
    """Wall fixed at R0 for all times."""
    if R0 <= 0:
        raise ValueError("R0 must be positive")

    def pos(t):
        return R0 + 0.0 * np.asarray(t, dtype=float)

    def zero(t):
        return 0.0 * np.asarray(t, dtype=float)

    return WallTrajectory(pos, zero, zero, 0.0, 0.0, label="static")


def harmonic_wall(R0, eps, Omega, t_end, t_start=0.0):
    """R(t) = R0 (1 + eps sin(Omega (t - t_start))) on [t_start, t_end].

    The drive switches on/off abruptly (position continuous, velocity
    jumps), which is the standard protocol for resonant photon creation.
    Pick t_end - t_start a multiple of pi/Omega to return the wall to R0.
    """
    if R0 <= 0:
        raise ValueError("R0 must be positive")
    if Omega <= 0:
        raise ValueError("Omega must be positive")
    if abs(eps) >= 1:
        raise ValueError("|eps| must be < 1")

    def pos(t):
        tc = np.clip(np.asarray(t, dtype=float), t_start, t_end)
        return R0 * (1.0 + eps * np.sin(Omega * (tc - t_start)))

    def vel(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= t_start) & (t <= t_end)
        return np.where(inside, R0 * eps * Omega * np.cos(Omega * (t - t_start)), 0.0)

    def acc(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= t_start) & (t <= t_end)
        return np.where(inside, -R0 * eps * Omega**2 * np.sin(Omega * (t - t_start)), 0.0)

    traj = WallTrajectory(pos, vel, acc, t_start, t_end, label="harmonic")
    return _check_speed(traj, "harmonic_wall")


def quintic_ramp(s):
    """Smoothstep 10 s^3 - 15 s^4 + 6 s^5 on [0,1]; value/slope/curvature vanish at 0,
    value 1 with zero slope/curvature at 1."""
    s = np.asarray(s, dtype=float)
    return s**3 * (10.0 - 15.0 * s + 6.0 * s**2)


def quintic_ramp_dot(s):
    """First derivative of the quintic smoothstep w.r.t. its argument."""
    s = np.asarray(s, dtype=float)
    return 30.0 * s**2 * (1.0 - s) ** 2


def _quintic_ramp_ddot(s):
    s = np.asarray(s, dtype=float)
    return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)


def quintic_wall(L0, eps, tau, t_start=0.0):
    """Compression L(t) = L0 (1 - eps * ramp((t - t_start)/tau)): L0 -> L0(1 - eps).

    C^2 at both endpoints, so the coupled-mode source terms switch on and
    off smoothly (the Otto work strokes use this shape).
    """
    if L0 <= 0:
        raise ValueError("L0 must be positive")
    if tau <= 0:
        raise ValueError("tau must be positive")
    if not -1.0 < eps < 1.0:
        raise ValueError("|eps| must be < 1")
    t_end = t_start + tau

    def pos(t):
        s = np.clip((np.asarray(t, dtype=float) - t_start) / tau, 0.0, 1.0)
        return L0 * (1.0 - eps * quintic_ramp(s))

    def vel(t):
        t = np.asarray(t, dtype=float)
        s = np.clip((t - t_start) / tau, 0.0, 1.0)
        inside = (t >= t_start) & (t <= t_end)
        return np.where(inside, -L0 * eps * quintic_ramp_dot(s) / tau, 0.0)

    def acc(t):
        t = np.asarray(t, dtype=float)
        s = np.clip((t - t_start) / tau, 0.0, 1.0)
        inside = (t >= t_start) & (t <= t_end)
        return np.where(inside, -L0 * eps * _quintic_ramp_ddot(s) / tau**2, 0.0)

    traj = WallTrajectory(pos, vel, acc, t_start, t_end, label="quintic")
    return _check_speed(traj, "quintic_wall")


def tabulated_wall(t, R, k=5):
    """Spline interpolant through samples (t, R) with analytic spline derivatives.

    The table must start and end at rest (the first/last samples are treated
    as the static values outside the window).
    """
    from scipy.interpolate import make_interp_spline

    t = np.asarray(t, dtype=float)
    R = np.asarray(R, dtype=float)
    if t.ndim != 1 or t.size < k + 1 or R.shape != t.shape:
        raise ValueError("need matching 1-D arrays with at least k+1 samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly increasing")
    if np.any(R <= 0):
        raise ValueError("wall positions must be positive")
    spl = make_interp_spline(t, R, k=k)
    d1 = spl.derivative(1)
    d2 = spl.derivative(2)
    t0, t1 = float(t[0]), float(t[-1])

    def pos(tt):
        tc = np.clip(np.asarray(tt, dtype=float), t0, t1)
        return spl(tc)

    def vel(tt):
        tt = np.asarray(tt, dtype=float)
        inside = (tt >= t0) & (tt <= t1)
        return np.where(inside, d1(np.clip(tt, t0, t1)), 0.0)

    def acc(tt):
        tt = np.asarray(tt, dtype=float)
        inside = (tt >= t0) & (tt <= t1)
        return np.where(inside, d2(np.clip(tt, t0, t1)), 0.0)

    traj = WallTrajectory(pos, vel, acc, t0, t1, label="tabulated")
    return _check_speed(traj, "tabulated_wall")


def reversed_trajectory(traj, t_start=None):
    """Time-mirrored copy: runs the same path backwards over a window of equal length.

    By default the reversed segment starts where the original ended, so the
    pair can be integrated back to back.
    """
    if t_start is None:
        t_start = traj.t_end
    span = traj.t_end - traj.t_start
    t_end = t_start + span
    # mirror: t in [t_start, t_end] maps to traj.t_end - (t - t_start)
    off = traj.t_end + t_start

    def pos(t):
        tc = np.clip(np.asarray(t, dtype=float), t_start, t_end)
        return traj.position(off - tc)

    def vel(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= t_start) & (t <= t_end)
        return np.where(inside, -traj.velocity(off - np.clip(t, t_start, t_end)), 0.0)

    def acc(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= t_start) & (t <= t_end)
        return np.where(inside, traj.acceleration(off - np.clip(t, t_start, t_end)), 0.0)

    return WallTrajectory(pos, vel, acc, t_start, t_end, label=f"{traj.label}-reversed")
