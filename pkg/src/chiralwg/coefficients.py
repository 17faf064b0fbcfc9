"""Closed-form master-equation coefficients for N atoms with many connection points.

For every atom ``j`` the layout gives its connection points ``j_1 .. j_M``.
The coefficients below are double sums over pairs of such points, weighted by
the geometric mean of the bare rates per direction and the phase picked up
between the two points.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import MasterEquation
from .hilbert import dagger, lowering, sigma_z
from .slh import DriveSpec
from .topology import ValidatedLayout, cumulative_phase


def epsilon_sign(rank_a, rank_b):
    """+1 if point a lies left of point b, 0 if they coincide, -1 otherwise."""
    if rank_a < rank_b:
        return 1
    if rank_a == rank_b:
        return 0
    return -1


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Coefficients of the effective master equation of one layout.

    Pair quantities ``g`` and ``gamma_coll`` are stored as ``N x N`` arrays
    whose entries with ``j < k`` are meaningful; the rest are zero.
    ``amp_right[j]`` is the coefficient of the lowering operator of atom ``j``
    in the right-moving collapse operator (likewise ``amp_left``).
    """

    names: tuple[str, ...]
    frequency: np.ndarray
    detuning: np.ndarray
    delta_omega: np.ndarray
    g: np.ndarray
    gamma: np.ndarray
    gamma_coll: np.ndarray
    amp_right: np.ndarray
    amp_left: np.ndarray
    total_phase: float

    @property
    def n_atoms(self):
        return len(self.names)

    @property
    def omega_prime(self):
        return self.frequency + self.delta_omega

    def rotating_frequencies(self, driven):
        """omega'_j in the lab frame, or detuning + shift in the drive frame."""
        base = self.detuning if driven else self.frequency
        return base + self.delta_omega

    @property
    def s_right(self):
        return cmath.exp(1j * self.total_phase)

    def pair(self, j, k):
        """(g, Gamma_coll) for the pair (j, k) with j < k."""
        if not j < k:
            raise ValueError("pair() needs j < k")
        return complex(self.g[j, k]), complex(self.gamma_coll[j, k])


def _geo(a, b):
    return math.sqrt(a * b)


def compute_coefficients(layout: ValidatedLayout) -> CoefficientSet:
    n = layout.n_atoms
    pts = layout.points
    owned = [layout.points_of(a.name) for a in layout.atoms]
    last = len(pts) - 1

    def phi(m, k):
        return cumulative_phase(layout, min(m, k), max(m, k))

    delta_omega = np.zeros(n)
    gamma = np.zeros(n)
    for j, idx in enumerate(owned):
        shift = 0.0
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                pa, pb = pts[idx[a]], pts[idx[b]]
                weight = _geo(pa.gamma_right, pb.gamma_right) + _geo(pa.gamma_left, pb.gamma_left)
                shift += weight * math.sin(phi(idx[a], idx[b]))
        delta_omega[j] = shift
        total = 0.0
        for a in idx:
            for b in idx:
                pa, pb = pts[a], pts[b]
                weight = _geo(pa.gamma_right, pb.gamma_right) + _geo(pa.gamma_left, pb.gamma_left)
                total += weight * math.cos(phi(a, b))
        gamma[j] = total

    g = np.zeros((n, n), dtype=complex)
    gamma_coll = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(j + 1, n):
            g_jk = 0j
            c_jk = 0j
            for a in owned[j]:
                for b in owned[k]:
                    pa, pb = pts[a], pts[b]
                    eps = epsilon_sign(pa.position_rank, pb.position_rank)
                    rr = _geo(pa.gamma_right, pb.gamma_right)
                    ll = _geo(pa.gamma_left, pb.gamma_left)
                    ph = phi(a, b)
                    fwd = cmath.exp(1j * eps * ph)
                    bwd = cmath.exp(-1j * eps * ph)
                    g_jk += eps / 2j * (rr * fwd - ll * bwd)
                    c_jk += rr * fwd + ll * bwd
            g[j, k] = g_jk
            gamma_coll[j, k] = c_jk

    amp_right = np.zeros(n, dtype=complex)
    amp_left = np.zeros(n, dtype=complex)
    for j, idx in enumerate(owned):
        for a in idx:
            p = pts[a]
            amp_right[j] += cmath.exp(1j * cumulative_phase(layout, a, last)) * math.sqrt(p.gamma_right)
            amp_left[j] += cmath.exp(1j * cumulative_phase(layout, 0, a)) * math.sqrt(p.gamma_left)

    return CoefficientSet(
        names=tuple(layout.atom_names),
        frequency=np.array([a.frequency for a in layout.atoms], dtype=float),
        detuning=np.array([a.detuning for a in layout.atoms], dtype=float),
        delta_omega=delta_omega,
        g=g,
        gamma=gamma,
        gamma_coll=gamma_coll,
        amp_right=amp_right,
        amp_left=amp_left,
        total_phase=layout.total_phase,
    )


def rabi_frequencies(coeffs: CoefficientSet, drive: DriveSpec):
    """Omega_j = 2 beta S_R conj(A_jR) for a drive entering from the left."""
    return 2.0 * drive.beta * coeffs.s_right * np.conj(coeffs.amp_right)


def beta_for_rabi(coeffs: CoefficientSet, omega, atom=0):
    """Drive amplitude beta that gives atom `atom` the Rabi frequency `omega`."""
    a = coeffs.amp_right[atom]
    if abs(a) == 0:
        raise ValueError(f"atom {coeffs.names[atom]!r} does not couple to right-movers")
    return DriveSpec(omega / (2.0 * coeffs.s_right * np.conj(a)))


def collapse_operators(coeffs: CoefficientSet):
    n = coeffs.n_atoms
    lows = [lowering(j, n) for j in range(n)]
    l_right = sum(coeffs.amp_right[j] * lows[j] for j in range(n))
    l_left = sum(coeffs.amp_left[j] * lows[j] for j in range(n))
    return [l_right, l_left]


def undriven_hamiltonian(coeffs: CoefficientSet, driven_frame=False):
    n = coeffs.n_atoms
    lows = [lowering(j, n) for j in range(n)]
    omega = coeffs.rotating_frequencies(driven_frame)
    H = sum(0.5 * omega[j] * sigma_z(j, n) for j in range(n))
    for j in range(n):
        for k in range(j + 1, n):
            term = coeffs.g[j, k] * lows[j] @ dagger(lows[k])
            H = H + term + dagger(term)
    return np.asarray(H, dtype=complex)


def drive_hamiltonian(coeffs: CoefficientSet, drive: DriveSpec):
    """-(i/2) sum_j Omega_j sigma_+^j + h.c."""
    n = coeffs.n_atoms
    omegas = rabi_frequencies(coeffs, drive)
    up = sum(omegas[j] * dagger(lowering(j, n)) for j in range(n))
    term = -0.5j * up
    return term + dagger(term)


def assemble_model(coeffs: CoefficientSet, drive: DriveSpec | None = None) -> MasterEquation:
    """Hamiltonian and (right, left) collapse operators of the layout."""
    H = undriven_hamiltonian(coeffs, driven_frame=drive is not None)
    if drive is not None:
        H = H + drive_hamiltonian(coeffs, drive)
    return MasterEquation(H, collapse_operators(coeffs))
