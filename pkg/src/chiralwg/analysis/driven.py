"""Dark states of two coherently driven atoms."""
from __future__ import annotations

import math

import numpy as np

from ..coefficients import CoefficientSet, assemble_model, rabi_frequencies
from ..hilbert import fix_phase, ket
from ..slh import DriveSpec
from .dark import DRIVEN_DS, DRIVEN_DT, DarkStateReport, singlet, triplet, two_atom_rates
from .dfi import xi_coupling


class NoDrivenDarkState(RuntimeError):
    pass


def analytic_dark_state(alpha, partner):
    """(alpha |partner> + |gg>) / sqrt(1 + |alpha|^2)."""
    v = alpha * partner + ket("gg")
    return v / math.sqrt(1.0 + abs(alpha) ** 2)


def driven_dark_state(coeffs: CoefficientSet, drive: DriveSpec, tol=1e-9) -> DarkStateReport:
    """The driven dark state |D_S> or |D_T> of a two-atom model.

    alpha is fixed by cancelling the amplitude that H sends from the
    candidate state into its bright partner,
    ``alpha = -<B|H|gg> / <B|H|X>`` with X in {S, T} and B the other one;
    its modulus is ``sqrt(2) |Omega| / (2 |xi|)``. The candidate that passes
    the dark-state conditions (annihilated by both collapse operators,
    eigenvector of H) is returned.
    """
    if coeffs.n_atoms != 2:
        raise ValueError(f"expected two atoms, got {coeffs.n_atoms}")
    if drive is None:
        raise ValueError("a drive is required")
    d_a, d_b = coeffs.detuning
    if abs(d_a + d_b) > tol * max(1.0, abs(d_a), abs(d_b)):
        raise NoDrivenDarkState(f"detunings must be opposite, got {d_a} and {d_b}")

    me = assemble_model(coeffs, drive)
    H = me.H
    gg = ket("gg")
    S, T = singlet(), triplet()
    h_scale = max(1.0, np.linalg.norm(H, 2))
    gamma_s, gamma_t, _ = two_atom_rates(me)
    xi = xi_coupling(coeffs, driven=True)
    reasons = []
    for kind, partner, bright in ((DRIVEN_DS, S, T), (DRIVEN_DT, T, S)):
        coupling = np.vdot(bright, H @ partner)
        if abs(coupling) <= tol * h_scale:
            reasons.append(f"{kind}: singlet-triplet coupling vanishes, alpha diverges")
            continue
        alpha = complex(-np.vdot(bright, H @ gg) / coupling)
        v = analytic_dark_state(alpha, partner)
        leak = max(np.linalg.norm(L @ v) for L in me.collapse_ops)
        mu = float(np.real(np.vdot(v, H @ v)))
        resid = np.linalg.norm(H @ v - mu * v)
        if leak > tol * max(1.0, *(np.linalg.norm(L, 2) for L in me.collapse_ops)):
            reasons.append(f"{kind}: collapse residual {leak:.3e}")
            continue
        if resid > tol * h_scale:
            reasons.append(f"{kind}: eigenvector residual {resid:.3e}")
            continue
        return DarkStateReport(
            state=fix_phase(v),
            eigenvalue=mu,
            kind=kind,
            alpha=alpha,
            gamma_d=float((coeffs.gamma[0] + coeffs.gamma[1]) / (1.0 + abs(alpha) ** 2)),
            gamma_s=gamma_s,
            gamma_t=gamma_t,
            xi=xi,
            kernel_dimension=1,
        )
    raise NoDrivenDarkState("; ".join(reasons))


def bright_partner(kind):
    """The single-excitation state left bright next to a driven dark state."""
    if kind == DRIVEN_DS:
        return triplet()
    if kind == DRIVEN_DT:
        return singlet()
    raise ValueError(f"not a driven dark state kind: {kind!r}")


def rabi_pair(coeffs: CoefficientSet, drive: DriveSpec):
    om = rabi_frequencies(coeffs, drive)
    return complex(om[0]), complex(om[1])
