"""SLH composition of cascaded waveguide networks.

A component with ``n`` ports is a triplet ``(S, L, H)``: an ``n x n``
scattering matrix, ``n`` coupling operators on the atomic space and a
Hamiltonian. Composing one triplet per connection point, one propagation
direction at a time, yields the collapse operators and Hamiltonian of the
whole layout without using any closed-form coefficient.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .hilbert import dagger, lowering, sigma_z
from .topology import ValidatedLayout


class PortMismatchError(ValueError):
    pass


class Direction(enum.Enum):
    RIGHT = "right"
    LEFT = "left"


@dataclass(frozen=True)
class DriveSpec:
    """Coherent drive entering from the left; ``|beta|^2`` is the boson flux."""

    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "beta", complex(self.beta))


@dataclass(frozen=True, eq=False)
class SlhTriplet:
    S: np.ndarray
    L: np.ndarray  # shape (n_ports, dim, dim)
    H: np.ndarray

    @property
    def n_ports(self):
        return self.S.shape[0]

    @property
    def dim(self):
        return self.H.shape[0]

    def is_valid(self, tol=1e-10):
        n = self.n_ports
        unitary = np.allclose(self.S @ dagger(self.S), np.eye(n), atol=tol)
        hermitian = np.linalg.norm(self.H - dagger(self.H)) <= tol * max(1.0, np.linalg.norm(self.H))
        return bool(unitary and hermitian)


def triplet(S, L, H):
    S = np.atleast_2d(np.asarray(S, dtype=complex))
    H = np.asarray(H, dtype=complex)
    L = np.asarray(L, dtype=complex).reshape(S.shape[0], H.shape[0], H.shape[0])
    return SlhTriplet(S, L, H)


def identity_triplet(dim, n_ports=1):
    return SlhTriplet(
        np.eye(n_ports, dtype=complex),
        np.zeros((n_ports, dim, dim), dtype=complex),
        np.zeros((dim, dim), dtype=complex),
    )


def vacuum_triplet(dim):
    """Triplet with no ports; the neutral element of :func:`concat`."""
    return identity_triplet(dim, n_ports=0)


def phase_triplet(phi, dim):
    t = identity_triplet(dim)
    return SlhTriplet(np.array([[cmath.exp(1j * phi)]]), t.L, t.H)


def coherent_input(beta, dim):
    """One-port source displacing the incoming field by `beta`."""
    return SlhTriplet(
        np.eye(1, dtype=complex),
        (complex(beta) * np.eye(dim, dtype=complex))[None],
        np.zeros((dim, dim), dtype=complex),
    )


def series(g2: SlhTriplet, g1: SlhTriplet) -> SlhTriplet:
    """Feed the output of `g1` into `g2`."""
    if g1.n_ports != g2.n_ports:
        raise PortMismatchError(f"cannot cascade {g1.n_ports} into {g2.n_ports} ports")
    if g1.dim != g2.dim:
        raise ValueError("triplets act on different Hilbert spaces")
    S = g2.S @ g1.S
    L = np.einsum("ij,jab->iab", g2.S, g1.L) + g2.L
    # sum_ij L2_i^dag S2_ij L1_j
    cross = np.einsum("iba,ij,jbc->ac", g2.L.conj(), g2.S, g1.L)
    H = g1.H + g2.H + (cross - dagger(cross)) / 2j
    return SlhTriplet(S, L, H)


def concat(g1: SlhTriplet, g2: SlhTriplet) -> SlhTriplet:
    if g1.dim != g2.dim:
        raise ValueError("triplets act on different Hilbert spaces")
    n1, n2 = g1.n_ports, g2.n_ports
    S = np.zeros((n1 + n2, n1 + n2), dtype=complex)
    S[:n1, :n1] = g1.S
    S[n1:, n1:] = g2.S
    return SlhTriplet(S, np.concatenate([g1.L, g2.L]), g1.H + g2.H)


def absorb_scalar_parts(g: SlhTriplet) -> SlhTriplet:
    """Move the c-number part of each coupling operator into the Hamiltonian.

    ``D[L + c] = D[L] - i[(i/2)(c* L - c L^dag), .]`` so the dynamics are
    unchanged while the collapse operators lose their drive dependence.
    """
    dim = g.dim
    eye = np.eye(dim, dtype=complex)
    L = g.L.copy()
    H = g.H.copy()
    for i in range(g.n_ports):
        c = np.trace(L[i]) / dim
        L[i] = L[i] - c * eye
        H = H + 0.5j * (np.conj(c) * L[i] - c * dagger(L[i]))
    return SlhTriplet(g.S.copy(), L, H)


def _point_triplet(layout, index, rate, bare_h):
    p = layout.points[index]
    dim = 2**layout.n_atoms
    site = layout.atom_index(p.owner)
    L = math.sqrt(rate) * lowering(site, layout.n_atoms)
    return SlhTriplet(np.eye(1, dtype=complex), L[None], bare_h)


def _bare_terms(layout, frequencies):
    """Map point index -> omega_j sigma_z^j / 2 at the first point of each atom."""
    dim = 2**layout.n_atoms
    terms = {}
    for j, atom in enumerate(layout.atoms):
        first = layout.points_of(atom.name)[0]
        terms[first] = 0.5 * frequencies[j] * sigma_z(j, layout.n_atoms)
    zero = np.zeros((dim, dim), dtype=complex)
    return [terms.get(k, zero) for k in range(len(layout.points))]


def compose_direction(
    layout: ValidatedLayout,
    direction: Direction | str,
    include_bare: bool = True,
    frequencies=None,
) -> SlhTriplet:
    """Cascade the per-point triplets along one propagation direction.

    Right-movers meet the points left to right, left-movers right to left;
    both pick up the same inter-point phases. The bare atomic term is attached
    at each atom's first point when `include_bare` is set.
    """
    direction = Direction(direction)
    n_points = len(layout.points)
    dim = 2**layout.n_atoms
    if frequencies is None:
        frequencies = [a.frequency for a in layout.atoms]
    if include_bare:
        bare = _bare_terms(layout, frequencies)
    else:
        bare = [np.zeros((dim, dim), dtype=complex)] * n_points

    def rate(k):
        p = layout.points[k]
        return p.gamma_right if direction is Direction.RIGHT else p.gamma_left

    if direction is Direction.RIGHT:
        order = range(n_points)
        gap = lambda k: layout.phases[k]  # phase from k to k + 1  # noqa: E731
    else:
        order = range(n_points - 1, -1, -1)
        gap = lambda k: layout.phases[k - 1]  # phase from k to k - 1  # noqa: E731

    result = None
    for step, k in enumerate(order):
        g = _point_triplet(layout, k, rate(k), bare[k])
        result = g if result is None else series(g, result)
        if step < n_points - 1:
            result = series(phase_triplet(gap(k), dim), result)
    return result


def compose_layout(layout: ValidatedLayout, drive: DriveSpec | None = None) -> SlhTriplet:
    """Two-port triplet (right port first) for the whole layout.

    With a drive, atomic frequencies are taken in the frame rotating at the
    drive frequency (the detunings), the drive enters through a coherent source
    ahead of the right-moving cascade, and its c-number coupling is absorbed
    into the Hamiltonian.
    """
    if drive is None:
        freqs = [a.frequency for a in layout.atoms]
    else:
        freqs = [a.detuning for a in layout.atoms]
    right = compose_direction(layout, Direction.RIGHT, frequencies=freqs)
    left = compose_direction(layout, Direction.LEFT, include_bare=False)
    if drive is not None and drive.beta != 0:
        right = series(right, coherent_input(drive.beta, right.dim))
        return absorb_scalar_parts(concat(right, left))
    return concat(right, left)
