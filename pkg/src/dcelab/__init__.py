"""Numerical laboratory for cavities with moving boundaries.

Four cross-checkable routes to the photon-creation problem (coupled-mode
ODE integration, multiple-scale analysis, conformal Moore-function
solution, SQUID transcendental spectra) plus two applications built on
them: a quantum Otto engine with dynamical-Casimir friction and a
controlled-squeeze gate for encoding a qubit in a resonator.

Natural units hbar = c = k_B = 1 everywhere except where a function
explicitly documents laboratory units.
"""

__version__ = "0.1.0"
