"""Sufficient conditions for an undriven dark state of N atoms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..coefficients import CoefficientSet, assemble_model
from .dark import find_dark_states, nontrivial


@dataclass(frozen=True)
class ConditionReport:
    amplitude_ratio: bool
    eigenstate: bool
    equal_frequencies: bool
    real_exchange: bool
    all_dark: bool

    @property
    def all_hold(self):
        return self.amplitude_ratio and self.eigenstate and self.equal_frequencies and self.real_exchange


def _ratio_ok(a_r, a_l, tol):
    """Right and left amplitude pairs are proportional and vanish together."""
    n_r, n_l = np.linalg.norm(a_r), np.linalg.norm(a_l)
    if (n_r > tol) != (n_l > tol):
        return False
    det = a_r[0] * a_l[1] - a_r[1] * a_l[0]
    return abs(det) <= tol * max(1.0, n_r * n_l)


def multi_atom_dark_conditions(coeffs: CoefficientSet, tol=1e-9) -> ConditionReport:
    """Evaluate the four sufficient dark-state conditions.

    1. the right- and left-moving amplitudes of every pair are proportional,
       with both directions coupled or both uncoupled;
    2. the collapse kernel holds a nontrivial eigenvector of H;
    3. all shifted frequencies omega'_j agree;
    4. every exchange rate g_{j,k} is real.
    """
    n = coeffs.n_atoms
    a_r, a_l = coeffs.amp_right, coeffs.amp_left
    all_dark = bool(np.all(np.abs(a_r) <= tol) and np.all(np.abs(a_l) <= tol))
    ratio = all(
        _ratio_ok(a_r[[j, k]], a_l[[j, k]], tol) for j in range(n) for k in range(j + 1, n)
    )
    reports = find_dark_states(assemble_model(coeffs), tol)
    eigen = bool(nontrivial(reports))
    w = coeffs.omega_prime
    equal = bool(np.ptp(w) <= tol * max(1.0, np.max(np.abs(w)))) if n else True
    real = bool(np.all(np.abs(np.imag(coeffs.g)) <= tol))
    return ConditionReport(ratio, eigen, equal, real, all_dark)
