"""Slow-time evolution of mode-mixing coefficients for a harmonically driven wall.

For wall motion R(t) = R0 (1 + eps sin(Omega t)) with eps << 1, secular terms
limit a naive expansion to eps*Omega*t << 1.  Introducing the slow time
tau = eps*t and keeping only the O(eps) terms whose frequency-matching
conditions fire (Omega equal to 2 w_k, w_k + w_j, or |w_k - w_j|) reduces the
coupled mode equations to a linear, constant-coefficient system in tau.  This
module classifies the active channels and integrates that system.

With amplitudes normalised as Q_k = (alpha_k e^{-i w_k t} + beta_k e^{+i w_k t})
/ sqrt(2 w_k), the slow system reads

    d(alpha)/dtau = beta Gc^T + alpha Gs^T
    d(beta)/dtau  = alpha Gc^T + beta Gs^T

where, writing K_kj = Omega mhat_kj / (2 sqrt(w_k w_j)) with mhat the
dimensionless antisymmetric coupling matrix,

    Gc[k,j] = -(w_k/2) delta_kj   if Omega = 2 w_k          (degenerate)
            +  K_kj (Omega/2 - w_j) if Omega = w_k + w_j    (pair creation)
    Gs[k,j] =  K_kj (w_j + Omega/2) if w_j = w_k - Omega    (scatter down)
            +  K_kj (w_j - Omega/2) if w_j = w_k + Omega    (scatter up)

Gc is symmetric and Gs antisymmetric, which makes the evolution symplectic:
sum_k(|alpha_nk|^2 - |beta_nk|^2) is conserved exactly, and a pure scattering
drive conserves sum_k |alpha_nk|^2 while creating no photons.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .cavity import ModeBasis

__all__ = [
    "ResonanceKind",
    "Resonance",
    "ResonanceReport",
    "SlowAmplitudes",
    "classify_resonances",
    "slow_generators",
    "evolve_slow",
]

DEFAULT_TOL = 1e-9


class ResonanceKind(Enum):
    DEGENERATE = "degenerate_2wk"
    SUM = "sum_wk_wj"
    DIFFERENCE = "difference_scatter"


@dataclass(frozen=True)
class Resonance:
    """One matched drive condition; mode indices are 1-based."""

    kind: ResonanceKind
    modes: tuple
    Omega: float


@dataclass(frozen=True)
class ResonanceReport:
    Omega: float
    tol: float
    entries: tuple

    def of_kind(self, kind):
        return tuple(r for r in self.entries if r.kind is kind)

    @property
    def creates_photons(self):
        """True if any degenerate or sum channel is active."""
        return any(r.kind is not ResonanceKind.DIFFERENCE for r in self.entries)

    def __len__(self):
        return len(self.entries)


def classify_resonances(basis: ModeBasis, Omega, tol=DEFAULT_TOL):
    """Test every mode and mode pair against the three matching conditions.

    Matching is |Omega - target| < tol * w_1; the spectra handled here are
    rational multiples of w_1, so tol only guards float rounding.
    """
    if Omega <= 0:
        raise ValueError("Omega must be positive")
    w = basis.omega
    cut = tol * w[0]
    entries = []
    for k in range(w.size):
        if abs(Omega - 2.0 * w[k]) < cut:
            entries.append(Resonance(ResonanceKind.DEGENERATE, (k + 1,), Omega))
    for k in range(w.size):
        for j in range(k + 1, w.size):
            if abs(Omega - (w[k] + w[j])) < cut:
                entries.append(Resonance(ResonanceKind.SUM, (k + 1, j + 1), Omega))
    for k in range(w.size):
        for j in range(k + 1, w.size):
            if abs(Omega - (w[j] - w[k])) < cut:
                entries.append(Resonance(ResonanceKind.DIFFERENCE, (k + 1, j + 1), Omega))
    return ResonanceReport(Omega=float(Omega), tol=float(tol), entries=tuple(entries))


def slow_generators(basis: ModeBasis, Omega, tol=DEFAULT_TOL):
    """Constant generators (Gc, Gs) of the slow flow; see module docstring."""
    w = basis.omega
    N = w.size
    mhat = basis.M * basis.spec.length
    cut = tol * w[0]
    K = (0.5 * Omega) * mhat / np.sqrt(np.outer(w, w))

    Gc = np.zeros((N, N))
    deg = np.abs(Omega - 2.0 * w) < cut
    Gc[np.diag_indices(N)] = np.where(deg, -0.5 * w, 0.0)
    sum_mask = np.abs(Omega - (w[:, None] + w[None, :])) < cut
    Gc += np.where(sum_mask, K * (0.5 * Omega - w[None, :]), 0.0)

    lo = np.abs(w[None, :] - (w[:, None] - Omega)) < cut
    hi = np.abs(w[None, :] - (w[:, None] + Omega)) < cut
    Gs = np.where(lo, K * (w[None, :] + 0.5 * Omega), 0.0) \
        + np.where(hi, K * (w[None, :] - 0.5 * Omega), 0.0)
    return Gc, Gs


@dataclass(frozen=True)
class SlowAmplitudes:
    """Mode-mixing coefficients sampled on a slow-time grid.

    alpha[i] and beta[i] are the N x N matrices at tau[i] (row n = in mode),
    starting from alpha = I, beta = 0. eps, if given, records the drive
    amplitude so samples can be placed in lab time t = tau / eps.
    """

    tau: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    Omega: float
    omega: np.ndarray
    eps: float | None = None

    @property
    def alpha_final(self):
        return self.alpha[-1]

    @property
    def beta_final(self):
        return self.beta[-1]

    @property
    def lab_time(self):
        if self.eps is None:
            raise ValueError("eps was not recorded; lab time undefined")
        return self.tau / self.eps

    def symplectic_defect(self, i=-1):
        a2 = np.abs(self.alpha[i]) ** 2
        b2 = np.abs(self.beta[i]) ** 2
        return (a2 - b2).sum(axis=1) - 1.0


def evolve_slow(basis: ModeBasis, Omega, R0=None, eps=None, tau_max=1.0,
                n_steps=None, n_samples=101, tol=DEFAULT_TOL):
    """Integrate the slow system over tau in [0, tau_max] from alpha=I, beta=0.

    Fixed-step classical RK4; the system is linear and smooth, so the step
    only needs to resolve the growth rate. Default step is tau_max/1000.
    R0 overrides the basis length (the generators scale with the frequencies
    at R0); eps is recorded for lab-time bookkeeping only.
    """
    if tau_max <= 0:
        raise ValueError("tau_max must be positive")
    if R0 is not None and not np.isclose(R0, basis.spec.length):
        from .cavity import CavitySpec
        basis = ModeBasis.build(CavitySpec(length=float(R0), n_modes=basis.spec.n_modes))
    Gc, Gs = slow_generators(basis, Omega, tol=tol)
    GcT, GsT = Gc.T.copy(), Gs.T.copy()
    N = basis.omega.size

    if n_steps is None:
        n_steps = 1000
    n_samples = int(min(n_samples, n_steps + 1))
    # land samples on step boundaries
    per = max(1, int(round(n_steps / max(n_samples - 1, 1))))
    n_steps = per * max(n_samples - 1, 1)
    h = tau_max / n_steps

    def deriv(a, b):
        return b @ GcT + a @ GsT, a @ GcT + b @ GsT

    a = np.eye(N, dtype=complex)
    b = np.zeros((N, N), dtype=complex)
    taus = np.empty(n_samples)
    alphas = np.empty((n_samples, N, N), dtype=complex)
    betas = np.empty((n_samples, N, N), dtype=complex)
    taus[0], alphas[0], betas[0] = 0.0, a, b
    isamp = 1
    for step in range(1, n_steps + 1):
        k1a, k1b = deriv(a, b)
        k2a, k2b = deriv(a + 0.5 * h * k1a, b + 0.5 * h * k1b)
        k3a, k3b = deriv(a + 0.5 * h * k2a, b + 0.5 * h * k2b)
        k4a, k4b = deriv(a + h * k3a, b + h * k3b)
        a = a + (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        b = b + (h / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        if step % per == 0:
            taus[isamp] = step * h
            alphas[isamp] = a
            betas[isamp] = b
            isamp += 1
    return SlowAmplitudes(tau=taus, alpha=alphas, beta=betas, Omega=float(Omega),
                          omega=basis.omega.copy(),
                          eps=None if eps is None else float(eps))
