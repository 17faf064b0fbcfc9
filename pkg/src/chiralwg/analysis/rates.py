"""Populating rates of driven dark states and giant-versus-small comparisons."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..coefficients import beta_for_rabi, compute_coefficients
from ..setups import TOPOLOGIES, driven_phases, two_atom_layout
from ..slh import DriveSpec
from .driven import driven_dark_state

GIANT = ("separate", "nested", "braided")


def populating_rate(topology, gamma_right, gamma_left, delta, omega=None, beta=None, phi2=0.0, dark="S"):
    """Closed-form Gamma_D for equal per-point rates, opposite detunings +-delta.

    Give exactly one of `omega` (Rabi frequency of atom a) or `beta` (drive
    amplitude). `phi2` is the middle phase of nested and braided atoms and
    `dark` selects the sign in the braided expression.
    """
    if (omega is None) == (beta is None):
        raise ValueError("give exactly one of omega or beta")
    g = gamma_right + gamma_left
    dg2 = (gamma_left - gamma_right) ** 2
    d2 = delta * delta
    sign = 1.0 if dark == "S" else -1.0
    if omega is not None:
        w2 = abs(omega) ** 2
        if topology == "small":
            return 2 * g * (dg2 + 4 * d2) / (2 * w2 + dg2 + 4 * d2)
        if topology == "separate":
            return 16 * g * (4 * dg2 + d2) / (w2 + 8 * dg2 + 2 * d2)
        if topology == "nested":
            return 8 * g * (1 + math.cos(phi2)) * d2 / (w2 + 2 * d2)
        if topology == "braided":
            return 8 * g * (1 + sign * math.cos(phi2)) * (dg2 + d2) / (w2 + 2 * dg2 + 2 * d2)
    else:
        x = gamma_right * abs(beta) ** 2
        if topology == "small":
            return 2 * g * (dg2 + 4 * d2) / (8 * x + dg2 + 4 * d2)
        if topology == "separate":
            return 8 * g * (4 * dg2 + d2) / (8 * x + 4 * dg2 + d2)
        if topology == "nested":
            c = 1 + math.cos(phi2)
            return 4 * g * c * d2 / (4 * x * c + d2)
        if topology == "braided":
            c = 1 + sign * math.cos(phi2)
            return 4 * g * c * (dg2 + d2) / (4 * x * c + dg2 + d2)
    raise ValueError(f"unknown topology {topology!r}")


def numeric_populating_rate(topology, gamma_right, gamma_left, delta, omega=None, beta=None, phi2=0.0, dark="S"):
    """Gamma_D from the assembled model via :func:`driven_dark_state`."""
    layout = two_atom_layout(
        topology,
        driven_phases(topology, dark, phi2),
        gamma_right,
        gamma_left,
        detunings=(delta, -delta),
    )
    coeffs = compute_coefficients(layout)
    drive = beta_for_rabi(coeffs, omega) if omega is not None else DriveSpec(complex(beta))
    return driven_dark_state(coeffs, drive).gamma_d


@dataclass(frozen=True)
class RateSweepReport:
    n_points: int
    max_giant_over_small: float
    worst_point: dict
    best_separate_over_small_beta: float
    best_beta_point: dict

    @property
    def bound_holds(self):
        return self.max_giant_over_small <= 64.0 * (1 + 1e-12)


def _sample(rng):
    gr = rng.uniform(0.0, 1.0)
    gl = rng.uniform(0.0, 1.0)
    return dict(
        gamma_right=gr,
        gamma_left=gl,
        delta=10 ** rng.uniform(-3, 1),
        omega=10 ** rng.uniform(-2, 2),
        phi2=rng.uniform(0.0, 2 * math.pi),
    )


def rate_comparison_sweep(n_points=10_000, seed=0, numeric=False):
    """Random search over parameters comparing giant and small populating rates.

    At equal Rabi frequency the largest giant/small ratio is recorded (the
    bound is 64). At equal drive amplitude with zero detuning the best
    separate/small ratio is located. With `numeric`, rates come from the
    assembled model instead of the closed forms.
    """
    rng = np.random.default_rng(seed)
    rate = numeric_populating_rate if numeric else populating_rate
    worst, worst_point = 0.0, {}
    for _ in range(n_points):
        p = _sample(rng)
        if numeric and p["delta"] == 0:
            continue
        small = rate("small", p["gamma_right"], p["gamma_left"], p["delta"], omega=p["omega"])
        for topo in GIANT:
            for dark in ("S", "T"):
                phi2 = p["phi2"]
                if topo == "nested" and abs(1 + math.cos(phi2)) < 1e-9:
                    continue
                val = rate(topo, p["gamma_right"], p["gamma_left"], p["delta"], omega=p["omega"], phi2=phi2, dark=dark)
                ratio = val / small
                if ratio > worst:
                    worst, worst_point = ratio, dict(p, topology=topo, dark=dark)

    best, best_point = 0.0, {}
    for _ in range(n_points):
        gr = rng.uniform(0.01, 1.0)
        gl = rng.uniform(0.0, 1.0)
        beta = 10 ** rng.uniform(-2, 2)
        delta = 0.0
        if abs(gl - gr) < 1e-6:
            continue
        sep = populating_rate("separate", gr, gl, delta, beta=beta)
        small = populating_rate("small", gr, gl, delta, beta=beta)
        if sep / small > best:
            best = sep / small
            best_point = dict(gamma_right=gr, gamma_left=gl, delta=delta, beta=beta)
    return RateSweepReport(n_points, worst, worst_point, best, best_point)


__all__ = [
    "GIANT",
    "TOPOLOGIES",
    "RateSweepReport",
    "numeric_populating_rate",
    "populating_rate",
    "rate_comparison_sweep",
]
