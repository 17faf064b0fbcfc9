"""Decoherence-free interaction and pair-level coefficient verdicts."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..coefficients import CoefficientSet


@dataclass(frozen=True, eq=False)
class DfiReport:
    is_dfi: bool
    residual_g: dict
    max_individual_decay: float
    max_collective_decay: float
    tol: float


def check_dfi(coeffs: CoefficientSet, tol=1e-9) -> DfiReport:
    """Exchange without loss: every Gamma_j and Gamma_coll vanishes, some g does not."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    n = coeffs.n_atoms
    pairs = {
        (coeffs.names[j], coeffs.names[k]): complex(coeffs.g[j, k])
        for j in range(n)
        for k in range(j + 1, n)
    }
    max_ind = float(np.max(np.abs(coeffs.gamma))) if n else 0.0
    coll = [abs(coeffs.gamma_coll[j, k]) for j in range(n) for k in range(j + 1, n)]
    max_coll = float(max(coll)) if coll else 0.0
    coupled = any(abs(g) > tol for g in pairs.values())
    is_dfi = max_ind <= tol and max_coll <= tol and coupled
    return DfiReport(is_dfi, pairs, max_ind, max_coll, tol)


def _require_pair(coeffs):
    if coeffs.n_atoms != 2:
        raise ValueError(f"expected two atoms, got {coeffs.n_atoms}")


def xi_coupling(coeffs: CoefficientSet, driven=False) -> complex:
    """(omega_b' - omega_a' + g - g*) / 2, the singlet-triplet coupling."""
    _require_pair(coeffs)
    w = coeffs.rotating_frequencies(driven)
    g = coeffs.g[0, 1]
    return complex((w[1] - w[0] + g - np.conj(g)) / 2.0)


def bright_decay_rates(coeffs: CoefficientSet):
    """(Gamma_S, Gamma_T) of the singlet and triplet."""
    _require_pair(coeffs)
    total = coeffs.gamma[0] + coeffs.gamma[1]
    re_coll = float(np.real(coeffs.gamma_coll[0, 1]))
    return 0.5 * (total - 2.0 * re_coll), 0.5 * (total + 2.0 * re_coll)
