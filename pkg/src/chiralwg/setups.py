"""Factories for the standard two-atom layouts and their driven phase choices."""
from __future__ import annotations

import math

from .topology import Atom, ConnectionPoint, Layout, ValidatedLayout, per_point, validate

PI = math.pi

ORDERS = {
    "small": "ab",
    "separate": "aabb",
    "nested": "abba",
    "braided": "abab",
}
TOPOLOGIES = tuple(ORDERS)


def two_atom_layout(
    topology,
    phases,
    gamma_right=0.5,
    gamma_left=0.5,
    frequencies=(0.0, 0.0),
    detunings=(0.0, 0.0),
) -> ValidatedLayout:
    """Atoms ``a`` and ``b`` in the given topology.

    Rates are scalars (same at every point) or per-point sequences.
    """
    try:
        order = ORDERS[topology]
    except KeyError:
        raise ValueError(f"unknown topology {topology!r}") from None
    atoms = [
        Atom("a", frequency=frequencies[0], detuning=detunings[0]),
        Atom("b", frequency=frequencies[1], detuning=detunings[1]),
    ]
    gr = per_point(gamma_right, len(order))
    gl = per_point(gamma_left, len(order))
    points = [ConnectionPoint(o, i, gr[i], gl[i]) for i, o in enumerate(order)]
    return validate(Layout(atoms, points, list(phases)))


def driven_phases(topology, dark, phi2=PI / 2):
    """Phase shifts under which |D_S> (dark="S") or |D_T> (dark="T") exists.

    For separate atoms the singlet needs phi2 = 0: with phi2 = pi the two
    atoms couple with opposite amplitudes and the triplet is dark instead.
    """
    if dark not in ("S", "T"):
        raise ValueError("dark must be 'S' or 'T'")
    s = dark == "S"
    if topology == "small":
        return (0.0,) if s else (PI,)
    if topology == "separate":
        return (0.0, 0.0, 0.0) if s else (0.0, PI, 0.0)
    if topology in ("nested", "braided"):
        outer = 0.0 if s else PI
        return (outer, phi2, outer)
    raise ValueError(f"unknown topology {topology!r}")


def matryoshka_layout(n_atoms=3, gamma_right=0.5, gamma_left=0.5) -> ValidatedLayout:
    """Atoms nested one inside the other: a b c ... c b a, all phases zero."""
    names = [chr(ord("a") + i) for i in range(n_atoms)]
    order = names + names[::-1]
    points = [ConnectionPoint(o, i, gamma_right, gamma_left) for i, o in enumerate(order)]
    return validate(Layout([Atom(n) for n in names], points, [0.0] * (len(order) - 1)))


def enclosed_braided_layout(gamma_right=0.5, gamma_left=0.5) -> ValidatedLayout:
    """Braided pair whose outermost points both belong to atom a: a b a b a."""
    order = "ababa"
    points = [ConnectionPoint(o, i, gamma_right, gamma_left) for i, o in enumerate(order)]
    return validate(Layout([Atom("a"), Atom("b")], points, [0.0] * 4))
