"""Quantum Otto cycle of the cavity field with motion-induced friction.

The working medium is the Dirichlet cavity; the piston is the moving wall,
L(t) = L0 (1 - eps * delta(t)) with a shape function delta ramping 0 -> 1.
In the adiabatic limit the cycle is the textbook Otto machine and its
efficiency is exactly the compression ratio eps. Moving the wall at finite
speed excites photon pairs, and that energy never returns to the piston:
to second order in eps it enters both work strokes as a positive,
trajectory-dependent loss

    E_F = (eps^2 / 4) sum_k w_k  II dt1 dt2  F_k(t1, t2),

a quantum analogue of friction. The kernel F_k has a self-squeeze term
oscillating at 2 w_k and intermode terms at w_j +- w_k; every term carries
ddelta/dt at both times, so E_F factorizes exactly through the velocity
transform C(a) = int ddelta/dt e^{i a t} dt as a sum of |C|^2 weights.
friction_energy uses that factorization (it is the tensor-product
quadrature of the double integral, done analytically in the oscillatory
direction); friction_kernel exposes the raw integrand for cross-checks.

Conventions: hbar = 1; beta_A is the cold bath attached at full length L0,
beta_C the hot bath at compressed length L1, so engine operation needs
beta_C / beta_A < 1 - eps, and the work vanishes exactly where the Otto
efficiency meets Carnot.
"""

from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial.legendre import leggauss

from .cavity import (
    dimensionless_coupling,
    dirichlet_spectrum,
    domega_dR,
    static_casimir_energy,
    thermal_occupation,
)
from .trajectories import quintic_ramp, quintic_ramp_dot

__all__ = [
    "CycleSpec",
    "CycleResult",
    "PowerCurve",
    "quintic_trajectory",
    "quintic_trajectory_dot",
    "random_admissible_trajectory",
    "friction_kernel",
    "friction_energy",
    "velocity_transform",
    "adiabatic_cycle",
    "nonadiabatic_cycle",
    "power_curve",
]


def quintic_trajectory(t, tau):
    """Lowest-order polynomial ramp with delta = ddelta = dddelta = 0 at t=0
    and delta = 1, ddelta = dddelta = 0 at t=tau."""
    t = np.asarray(t, dtype=float)
    if np.any(t < -1e-12 * tau) or np.any(t > tau * (1 + 1e-12)):
        raise ValueError("t outside [0, tau]")
    return quintic_ramp(np.clip(t / tau, 0.0, 1.0))


def quintic_trajectory_dot(t, tau):
    """Analytic time derivative of quintic_trajectory."""
    t = np.asarray(t, dtype=float)
    return quintic_ramp_dot(np.clip(t / tau, 0.0, 1.0)) / tau


def random_admissible_trajectory(rng, amplitude=1.0, order=2):
    """Random shape meeting all endpoint constraints of the friction theory.

    Adds s^3 (1-s)^3 * q(s) to the quintic ramp with a random polynomial q,
    which keeps value, velocity and acceleration pinned at both ends.
    Returns (delta, delta_dot) callables with signature (t, tau).
    """
    coeffs = rng.uniform(-amplitude, amplitude, size=order + 1) * 64.0

    def bump(s):
        return s**3 * (1.0 - s) ** 3 * np.polynomial.polynomial.polyval(s, coeffs)

    def bump_dot(s):
        q = np.polynomial.polynomial.polyval(s, coeffs)
        dq = np.polynomial.polynomial.polyval(s, np.polynomial.polynomial.polyder(coeffs))
        w = s**3 * (1.0 - s) ** 3
        dw = 3.0 * s**2 * (1.0 - s) ** 2 * (1.0 - 2.0 * s)
        return dw * q + w * dq

    def delta(t, tau):
        s = np.clip(np.asarray(t, dtype=float) / tau, 0.0, 1.0)
        return quintic_ramp(s) + bump(s)

    def delta_dot(t, tau):
        s = np.clip(np.asarray(t, dtype=float) / tau, 0.0, 1.0)
        return (quintic_ramp_dot(s) + bump_dot(s)) / tau

    return delta, delta_dot


@dataclass(frozen=True)
class CycleSpec:
    """One Otto cycle: geometry, baths, stroke duration and wall shape.

    beta_A (cold) thermalizes at length L0, beta_C (hot) at L1 = L0(1-eps).
    delta/delta_dot default to the quintic ramp; a custom delta without an
    analytic derivative gets a central finite difference (the friction
    quadrature only needs ~1e-8 relative accuracy from it).
    """

    L0: float
    eps: float
    beta_A: float
    beta_C: float
    tau: float
    n_modes: int = 30
    delta: object = None
    delta_dot: object = None
    include_casimir: bool = False

    def __post_init__(self):
        if self.L0 <= 0.0:
            raise ValueError("L0 must be positive")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("compression ratio must satisfy 0 < eps < 1")
        if self.beta_A <= 0.0 or self.beta_C <= 0.0:
            raise ValueError("bath inverse temperatures must be positive")
        if self.tau <= 0.0:
            raise ValueError("stroke duration must be positive")
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        if self.delta is not None:
            d0 = float(self.delta(0.0, self.tau))
            d1 = float(self.delta(self.tau, self.tau))
            if abs(d0) > 1e-8 or abs(d1 - 1.0) > 1e-8:
                raise ValueError("delta must ramp from 0 at t=0 to 1 at t=tau")

    def shape(self):
        """(delta, delta_dot) callables, filling in defaults."""
        if self.delta is None:
            return quintic_trajectory, quintic_trajectory_dot
        if self.delta_dot is not None:
            return self.delta, self.delta_dot
        h = 1e-6 * self.tau
        tau = self.tau

        def fd(t, _tau):
            hi = np.minimum(np.asarray(t, dtype=float) + h, tau)
            lo = np.maximum(hi - 2.0 * h, 0.0)
            hi = lo + 2.0 * h
            return (self.delta(hi, tau) - self.delta(lo, tau)) / (2.0 * h)

        return self.delta, fd

    @property
    def L1(self):
        return self.L0 * (1.0 - self.eps)


@dataclass(frozen=True)
class CycleResult:
    """Corner energies and the derived work, heat, efficiency and power.

    W and Q come straight from the corner energies (W = E_A - E_B + E_C -
    E_D, Q = E_C - E_B), so toggling the static Casimir offsets cannot move
    them. eta is the exact ratio W/Q (NaN when the cycle degenerates,
    Q = 0); eta_linear is the first-order expansion eps - (E_F^A + E_F^C) /
    Q_Otto. engine is True when the cycle delivers work from absorbed heat.
    """

    E_A: float
    E_B: float
    E_C: float
    E_D: float
    W: float
    Q: float
    eta: float
    eta_linear: float
    P: float
    engine: bool


_GL_X, _GL_W = leggauss(16)


def velocity_transform(spec: CycleSpec, a_values):
    """C(a) = int_0^tau ddelta/dt e^{i a t} dt for each requested frequency.

    Composite 16-point Gauss-Legendre with panel width <= 3 radians of the
    oscillation, which is machine accurate for smooth shapes. C(0) = 1 by
    the ramp endpoints.
    """
    _, ddot = spec.shape()
    tau = spec.tau
    a_values = np.atleast_1d(np.asarray(a_values, dtype=float))
    out = np.empty(a_values.shape, dtype=complex)
    for i, a in enumerate(a_values):
        n_panels = max(4, int(np.ceil(abs(a) * tau / 3.0)))
        edges = np.linspace(0.0, tau, n_panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1] - edges[0])
        t_q = (mid[:, None] + half * _GL_X).ravel()
        w_q = np.broadcast_to(half * _GL_W, (n_panels, 16)).ravel()
        out[i] = np.sum(w_q * ddot(t_q, tau) * np.exp(1j * a * t_q))
    return out


def _kernel_weights(spec: CycleSpec, beta):
    """Mode data shared by the kernel and its factorized double integral."""
    omega = dirichlet_spectrum(spec.n_modes, spec.L0)
    nbar = thermal_occupation(beta, omega)
    pref = (domega_dR(omega, spec.L0) * spec.L0 / omega) ** 2
    g2 = dimensionless_coupling(spec.n_modes) ** 2
    inv = g2 / np.outer(omega, omega)
    dif2 = (omega[:, None] - omega[None, :]) ** 2
    sum2 = (omega[:, None] + omega[None, :]) ** 2
    # [j, k] blocks of the j-sum: pair term at w_j + w_k, scatter at w_j - w_k
    pair = inv * dif2 * (nbar[None, :] + nbar[:, None] + 1.0)
    scatter = inv * sum2 * (nbar[:, None] - nbar[None, :])
    return omega, nbar, pref, pair, scatter


def friction_kernel(t1, t2, k, beta, spec: CycleSpec):
    """Integrand F_k(t1, t2) of the friction energy for mode k (1-based).

    Squeeze term at 2 w_k weighted by 2 N_k + 1, plus the j-sum of pair
    creation at w_j + w_k and thermal scattering at w_j - w_k, all carrying
    ddelta(t1) ddelta(t2). Symmetric in t1 <-> t2; broadcasts over arrays.
    """
    if not 1 <= k <= spec.n_modes:
        raise ValueError("mode index k must lie in [1, n_modes]")
    omega, nbar, pref, pair, scatter = _kernel_weights(spec, beta)
    _, ddot = spec.shape()
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    dt = t1 - t2
    i = k - 1
    val = pref[i] * (2.0 * nbar[i] + 1.0) * np.cos(2.0 * omega[i] * dt)
    for j in range(spec.n_modes):
        if j == i:
            continue
        val = val + pair[j, i] * np.cos((omega[j] + omega[i]) * dt)
        val = val + scatter[j, i] * np.cos((omega[j] - omega[i]) * dt)
    out = ddot(t1, spec.tau) * ddot(t2, spec.tau) * val
    return float(out) if np.ndim(out) == 0 else out


def friction_energy(spec: CycleSpec, beta, check_convergence=False):
    """Energy lost to photon creation in one stroke, always >= 0.

    Factorizes the double time integral exactly: each cos(a(t1-t2)) block
    contributes |C(a)|^2 with the velocity transform C, so only the 1-d
    oscillatory integrals are quadrature. With check_convergence the mode
    sum is repeated at twice the truncation and a drift above 0.1% raises
    (reporting both partial sums); the thermal factors decay exponentially
    but fast strokes populate modes up to ~1/(w_1 tau).
    """
    val = _friction_energy(spec, beta)
    if check_convergence:
        wide = _friction_energy(replace(spec, n_modes=2 * spec.n_modes), beta)
        if abs(wide - val) > 1e-3 * max(abs(wide), 1e-300):
            raise RuntimeError(
                f"friction mode sum not converged: E_F = {val:.6e} at "
                f"n_modes = {spec.n_modes}, {wide:.6e} at {2 * spec.n_modes}")
        val = wide
    return val


def _friction_energy(spec: CycleSpec, beta):
    omega, nbar, pref, pair, scatter = _kernel_weights(spec, beta)
    a_sum = omega[:, None] + omega[None, :]
    a_dif = np.abs(omega[:, None] - omega[None, :])
    a_all = np.unique(np.concatenate([2.0 * omega, a_sum.ravel(), a_dif.ravel()]))
    C2 = np.abs(velocity_transform(spec, a_all)) ** 2
    c2_sq = C2[np.searchsorted(a_all, 2.0 * omega)]
    c2_sum = C2[np.searchsorted(a_all, a_sum)]
    c2_dif = C2[np.searchsorted(a_all, a_dif)]
    off = ~np.eye(spec.n_modes, dtype=bool)
    per_k = pref * (2.0 * nbar + 1.0) * c2_sq
    per_k = per_k + np.sum((pair * c2_sum + scatter * c2_dif) * off, axis=0)
    return 0.25 * spec.eps**2 * np.sum(omega * per_k)


def _corner_energies(spec: CycleSpec):
    omega0 = dirichlet_spectrum(spec.n_modes, spec.L0)
    omega1 = dirichlet_spectrum(spec.n_modes, spec.L1)
    n_cold = thermal_occupation(spec.beta_A, omega0)
    n_hot = thermal_occupation(spec.beta_C, omega1)
    E_A = np.sum(omega0 * n_cold)
    E_B = np.sum(omega1 * n_cold)
    E_C = np.sum(omega1 * n_hot)
    E_D = np.sum(omega0 * n_hot)
    if spec.include_casimir:
        E_A += static_casimir_energy(spec.L0)
        E_B += static_casimir_energy(spec.L1)
        E_C += static_casimir_energy(spec.L1)
        E_D += static_casimir_energy(spec.L0)
    return E_A, E_B, E_C, E_D


def _assemble(spec, E_A, E_B, E_C, E_D, Q_otto, ef_total):
    W = (E_A - E_B) + (E_C - E_D)
    Q = E_C - E_B
    eta = W / Q if abs(Q) > 1e-300 else float("nan")
    eta_lin = spec.eps - ef_total / Q_otto if abs(Q_otto) > 1e-300 else float("nan")
    return CycleResult(
        E_A=float(E_A), E_B=float(E_B), E_C=float(E_C), E_D=float(E_D),
        W=float(W), Q=float(Q), eta=float(eta), eta_linear=float(eta_lin),
        P=float(W / (2.0 * spec.tau)), engine=bool(W > 0.0 and Q > 0.0))


def adiabatic_cycle(spec: CycleSpec) -> CycleResult:
    """Quasi-static baseline: occupations ride the spectrum unchanged.

    For the Dirichlet spectrum every mode is rescaled by the same factor,
    so eta = W/Q equals the compression ratio eps exactly, independent of
    the baths; it meets the Carnot bound 1 - beta_C/beta_A precisely at
    beta_C/beta_A = 1 - eps, which is also where W and Q vanish.
    """
    E_A, E_B, E_C, E_D = _corner_energies(spec)
    return _assemble(spec, E_A, E_B, E_C, E_D, E_C - E_B, 0.0)


def nonadiabatic_cycle(spec: CycleSpec, check_convergence=False) -> CycleResult:
    """Otto cycle with the finite-speed friction loss in both strokes.

    The compression leg deposits E_F at the cold occupations into E_B, the
    expansion leg E_F at the hot occupations into E_D (time reversal leaves
    E_F unchanged, and the L1-vs-L0 base distinction is higher order in
    eps). Heat and work then follow from the corner energies; the exact
    efficiency is always below the adiabatic eps while friction is on.
    """
    E_A, E_B, E_C, E_D = _corner_energies(spec)
    Q_otto = E_C - E_B
    ef_cold = friction_energy(spec, spec.beta_A, check_convergence)
    ef_hot = friction_energy(spec, spec.beta_C, check_convergence)
    return _assemble(spec, E_A, E_B + ef_cold, E_C, E_D + ef_hot,
                     Q_otto, ef_cold + ef_hot)


@dataclass(frozen=True)
class PowerCurve:
    """Cycle sweep over stroke durations; P uses cycle time 2 tau.

    Thermalization is taken as instantaneous (the cycle spends time only in
    the two work strokes); swap in a different cycle-time rule by rescaling
    P externally. i_peak marks the argmax of P.
    """

    tau: np.ndarray
    P: np.ndarray
    W: np.ndarray
    Q: np.ndarray
    eta: np.ndarray
    i_peak: int

    @property
    def tau_peak(self):
        return float(self.tau[self.i_peak])


def power_curve(spec: CycleSpec, tau_grid) -> PowerCurve:
    """nonadiabatic_cycle swept over stroke durations.

    Slow strokes approach the adiabatic work at vanishing power, P tau ->
    W_Otto / 2; fast strokes are friction dominated with |P| growing like
    1/tau^4 until truncation cuts the mode ladder, so the curve has a
    unique interior maximum at tau w_1 ~ 1.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if np.any(tau_grid <= 0.0):
        raise ValueError("tau grid must be positive")
    res = [nonadiabatic_cycle(replace(spec, tau=float(t))) for t in tau_grid]
    P = np.array([r.P for r in res])
    return PowerCurve(
        tau=tau_grid, P=P,
        W=np.array([r.W for r in res]),
        Q=np.array([r.Q for r in res]),
        eta=np.array([r.eta for r in res]),
        i_peak=int(np.argmax(P)))
