"""Two-atom coefficient tables written out term by term.

These transcriptions are kept separate from the general double sums in
``coefficients`` so the two can check each other. Points are numbered 1..4
from left to right and `gr`, `gl` hold the per-point rates.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .analysis import find_dark_states, nontrivial
from .analysis.rates import numeric_populating_rate, populating_rate
from .coefficients import assemble_model, compute_coefficients
from .setups import TOPOLOGIES, two_atom_layout

PI = math.pi


def _e(x):
    return cmath.exp(1j * x)


def _s(a, b):
    return math.sqrt(a * b)


def table_coefficients(topology, phases, gr, gl):
    """(dw_a, dw_b, Gamma_a, Gamma_b, Gamma_coll, g) for arbitrary per-point rates."""
    R = [None] + list(gr)
    L = [None] + list(gl)
    if topology == "small":
        (p,) = phases
        coll = _s(R[1], R[2]) * _e(p) + _s(L[1], L[2]) * _e(-p)
        g = (_s(R[1], R[2]) * _e(p) - _s(L[1], L[2]) * _e(-p)) / 2j
        return 0.0, 0.0, R[1] + L[1], R[2] + L[2], coll, g
    p1, p2, p3 = phases

    def local(m, n, phi):
        w = _s(R[m], R[n]) + _s(L[m], L[n])
        return w * math.sin(phi), R[m] + L[m] + R[n] + L[n] + 2 * w * math.cos(phi)

    if topology == "separate":
        dwa, ga = local(1, 2, p1)
        dwb, gb = local(3, 4, p3)
        r_terms = [(1, 3, p1 + p2, 1), (1, 4, p1 + p2 + p3, 1), (2, 3, p2, 1), (2, 4, p2 + p3, 1)]
    elif topology == "nested":
        dwa, ga = local(1, 4, p1 + p2 + p3)
        dwb, gb = local(2, 3, p2)
        r_terms = [(1, 2, p1, 1), (1, 3, p1 + p2, 1), (2, 4, -(p2 + p3), -1), (3, 4, -p3, -1)]
    elif topology == "braided":
        dwa, ga = local(1, 3, p1 + p2)
        dwb, gb = local(2, 4, p2 + p3)
        r_terms = [(1, 2, p1, 1), (1, 4, p1 + p2 + p3, 1), (2, 3, -p2, -1), (3, 4, p3, 1)]
    else:
        raise ValueError(f"unknown topology {topology!r}")
    # each term: points m < n, right-moving phase, sign of epsilon for the (a, b) ordering
    coll = sum(_s(R[m], R[n]) * _e(ph) + _s(L[m], L[n]) * _e(-ph) for m, n, ph, _ in r_terms)
    g = sum(eps * (_s(R[m], R[n]) * _e(ph) - _s(L[m], L[n]) * _e(-ph)) for m, n, ph, eps in r_terms) / 2j
    return dwa, dwb, ga, gb, coll, g


def table_equal_rates(topology, phases, gamma_right, gamma_left):
    """The compact equal-rate forms of the same coefficients."""
    gR, gL = gamma_right, gamma_left
    gam = gR + gL
    if topology == "small":
        (p,) = phases
        return 0.0, 0.0, gam, gam, gR * _e(p) + gL * _e(-p), (gR * _e(p) - gL * _e(-p)) / 2j
    p1, p2, p3 = phases
    if topology == "separate":
        dwa, dwb = gam * math.sin(p1), gam * math.sin(p3)
        ga, gb = 2 * gam * (1 + math.cos(p1)), 2 * gam * (1 + math.cos(p3))
        r = _e(p1 + p2) + _e(p1 + p2 + p3) + _e(p2) + _e(p2 + p3)
        l = _e(-(p1 + p2)) + _e(-(p1 + p2 + p3)) + _e(-p2) + _e(-(p2 + p3))
        return dwa, dwb, ga, gb, gR * r + gL * l, (gR * r - gL * l) / 2j
    if topology == "nested":
        dwa, dwb = gam * math.sin(p1 + p2 + p3), gam * math.sin(p2)
        ga, gb = 2 * gam * (1 + math.cos(p1 + p2 + p3)), 2 * gam * (1 + math.cos(p2))
        coll = gR * (_e(p1) + _e(p1 + p2) + _e(-(p2 + p3)) + _e(-p3)) + gL * (
            _e(-p1) + _e(-(p1 + p2)) + _e(p2 + p3) + _e(p3)
        )
        g = (
            gR * (_e(p1) + _e(p1 + p2) - _e(-(p2 + p3)) - _e(-p3))
            - gL * (_e(-p1) + _e(-(p1 + p2)) - _e(p2 + p3) - _e(p3))
        ) / 2j
        return dwa, dwb, ga, gb, coll, g
    if topology == "braided":
        dwa, dwb = gam * math.sin(p1 + p2), gam * math.sin(p2 + p3)
        ga, gb = 2 * gam * (1 + math.cos(p1 + p2)), 2 * gam * (1 + math.cos(p2 + p3))
        coll = gR * (_e(p1) + _e(p1 + p2 + p3) + _e(-p2) + _e(p3)) + gL * (
            _e(-p1) + _e(-(p1 + p2 + p3)) + _e(p2) + _e(-p3)
        )
        g = (
            gR * (_e(p1) + _e(p1 + p2 + p3) - _e(-p2) + _e(p3))
            - gL * (_e(-p1) + _e(-(p1 + p2 + p3)) - _e(p2) + _e(-p3))
        ) / 2j
        return dwa, dwb, ga, gb, coll, g
    raise ValueError(f"unknown topology {topology!r}")


def table_collapse_amplitudes(topology, phases, gr, gl):
    """((A_aR, A_bR), (A_aL, A_bL)): coefficients of sigma_- in L_R and L_L."""
    R = [None] + [math.sqrt(x) for x in gr]
    L = [None] + [math.sqrt(x) for x in gl]
    if topology == "small":
        (p,) = phases
        return (R[1] * _e(p), R[2]), (L[1], L[2] * _e(p))
    p1, p2, p3 = phases
    s = p1 + p2 + p3
    if topology == "separate":
        return (
            (R[1] * _e(s) + R[2] * _e(p2 + p3), R[3] * _e(p3) + R[4]),
            (L[2] * _e(p1) + L[1], L[4] * _e(s) + L[3] * _e(p1 + p2)),
        )
    if topology == "nested":
        return (
            (R[1] * _e(s) + R[4], R[2] * _e(p2 + p3) + R[3] * _e(p3)),
            (L[4] * _e(s) + L[1], L[3] * _e(p1 + p2) + L[2] * _e(p1)),
        )
    if topology == "braided":
        return (
            (R[1] * _e(s) + R[3] * _e(p3), R[2] * _e(p2 + p3) + R[4]),
            (L[1] + L[3] * _e(p1 + p2), L[2] * _e(p1) + L[4] * _e(s)),
        )
    raise ValueError(f"unknown topology {topology!r}")


def _same(a, b, tol=1e-9):
    return abs((a - b + PI) % (2 * PI) - PI) <= tol


def expected_dark_state(topology, phases, gamma_right, gamma_left, equal_frequencies=True):
    """'Singlet', 'Triplet' or None according to the undriven dark-state conditions."""
    if not equal_frequencies:
        return None
    bidirectional = abs(gamma_right - gamma_left) <= 1e-12
    if topology == "small":
        if not bidirectional:
            return None
        if _same(phases[0], 0):
            return "Singlet"
        if _same(phases[0], PI):
            return "Triplet"
        return None
    p1, p2, p3 = phases
    if topology == "separate":
        if not bidirectional or not _same(p1, p3) or _same(p1, PI):
            return None
        if _same(p1, -p2):
            return "Singlet"
        if _same(p1 + p2, PI):
            return "Triplet"
        return None
    if topology == "nested":
        if _same(p1, 0) and _same(p3, 0) and not _same(p2, PI):
            return "Singlet"
        if _same(p1, PI) and _same(p3, PI) and not _same(p2, PI):
            return "Triplet"
        return None
    if topology == "braided":
        if not bidirectional:
            return None
        if _same(p1, 0) and _same(p3, 0) and not _same(p2, PI):
            return "Singlet"
        if _same(p1, PI) and _same(p3, PI) and not _same(p2, 0):
            return "Triplet"
        return None
    raise ValueError(f"unknown topology {topology!r}")


@dataclass(frozen=True)
class TableRow:
    table: str
    row: str
    deviation: float
    passed: bool


def _max_dev(a, b):
    return max(abs(complex(x) - complex(y)) for x, y in zip(a, b))


def _computed(layout):
    c = compute_coefficients(layout)
    return (
        c.delta_omega[0],
        c.delta_omega[1],
        c.gamma[0],
        c.gamma[1],
        c.gamma_coll[0, 1],
        c.g[0, 1],
    ), c


def check_coefficient_rows(topology, phases, gr, gl, tol=1e-12):
    """Rows for the per-point and equal-rate coefficient tables and the collapse table."""
    n = len(phases) + 1
    gr, gl = list(gr), list(gl)
    if len(gr) != n or len(gl) != n:
        raise ValueError("need one rate per point")
    got, c = _computed(two_atom_layout(topology, phases, gr, gl))
    rows = []
    dev = _max_dev(got, table_coefficients(topology, phases, gr, gl))
    rows.append(TableRow("VI", topology, dev, dev <= tol))
    if len(set(gr)) == 1 and len(set(gl)) == 1:
        dev = _max_dev(got, table_equal_rates(topology, phases, gr[0], gl[0]))
        rows.append(TableRow("I", topology, dev, dev <= tol))
    (ar, al) = table_collapse_amplitudes(topology, phases, gr, gl)
    dev = _max_dev(list(ar) + list(al), list(c.amp_right) + list(c.amp_left))
    rows.append(TableRow("V", topology, dev, dev <= tol))
    return rows


def check_dark_state_grid(topology, gamma_right, gamma_left, step=PI / 6, tol=1e-9):
    """Scan the phase grid and compare the dark-state finder with the listed conditions.

    Singlet/Triplet must be found exactly where expected; any other dark
    state must carry the Other label. Points where an atom decouples
    entirely (Gamma_j = 0) are skipped. Returns ``(TableRow, n_checked,
    n_skipped)``.
    """
    n_steps = int(round(2 * PI / step))
    grid = [k * step for k in range(n_steps)]
    n_phases = 1 if topology == "small" else 3
    mismatches = checked = skipped = 0
    for phases in itertools.product(grid, repeat=n_phases):
        for same in (True, False):
            layout = two_atom_layout(topology, phases, gamma_right, gamma_left, frequencies=(1.0, 1.0 if same else 1.3))
            c = compute_coefficients(layout)
            if np.any(np.abs(c.gamma) <= tol):
                skipped += 1
                continue
            checked += 1
            found = [r.kind for r in nontrivial(find_dark_states(assemble_model(c), tol))]
            st = [k for k in found if k in ("Singlet", "Triplet")]
            expected = expected_dark_state(topology, phases, gamma_right, gamma_left, same)
            ok = st == ([expected] if expected else []) and all(k in ("Singlet", "Triplet", "Other") for k in found)
            mismatches += not ok
    row = TableRow("II", f"{topology} gamma=({gamma_right:g},{gamma_left:g})", float(mismatches), mismatches == 0)
    return row, checked, skipped


def check_rate_rows(gamma_right, gamma_left, delta, omega, phi2=PI / 3, rel_tol=1e-9):
    """Closed-form populating rates against the assembled model for every setup."""
    rows = []
    for topology in TOPOLOGIES:
        for dark in ("S", "T"):
            closed = populating_rate(topology, gamma_right, gamma_left, delta, omega=omega, phi2=phi2, dark=dark)
            numeric = numeric_populating_rate(topology, gamma_right, gamma_left, delta, omega=omega, phi2=phi2, dark=dark)
            dev = abs(closed - numeric) / max(abs(closed), 1e-300)
            rows.append(TableRow("IV", f"{topology} D_{dark}", dev, dev <= rel_tol))
    return rows
