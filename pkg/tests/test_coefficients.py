import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chiralwg.cli import oracle_deviation
from chiralwg.coefficients import (
    assemble_model,
    beta_for_rabi,
    compute_coefficients,
    epsilon_sign,
    rabi_frequencies,
)
from chiralwg.hilbert import dagger, lowering, sigma_z
from chiralwg.setups import TOPOLOGIES, two_atom_layout
from chiralwg.slh import DriveSpec
from chiralwg.tables import check_coefficient_rows
from chiralwg.topology import Atom, ConnectionPoint, Layout, make_layout, validate

PI = math.pi


def test_epsilon_sign():
    assert epsilon_sign(1, 3) == 1
    assert epsilon_sign(2, 2) == 0
    assert epsilon_sign(5, 4) == -1


def test_small_chiral_pair():
    c = compute_coefficients(two_atom_layout("small", (0.0,), 0.7, 0.3))
    assert c.gamma_coll[0, 1] == pytest.approx(1.0, abs=1e-12)
    assert c.g[0, 1] == pytest.approx(-0.2j, abs=1e-12)
    assert np.allclose(c.gamma, [1.0, 1.0], atol=1e-12)
    assert np.allclose(c.delta_omega, 0.0, atol=1e-12)


def test_braided_bidirectional_is_decoherence_free():
    c = compute_coefficients(two_atom_layout("braided", (PI / 2,) * 3, 0.5, 0.5))
    assert np.allclose(c.gamma, 0, atol=1e-12)
    assert abs(c.gamma_coll[0, 1]) < 1e-12
    assert c.g[0, 1] == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(c.delta_omega, 0, atol=1e-12)


def test_braided_residual_exchange_formula():
    gr, gl, p2 = 0.9, 0.1, PI / 2
    c = compute_coefficients(two_atom_layout("braided", (PI / 2, p2, PI / 2), gr, gl))
    expected = (2 * gl * np.exp(1j * p2) - 2 * gr * np.exp(-1j * p2)) / 2j
    assert c.g[0, 1] == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("topology", TOPOLOGIES)
def test_all_zero_rates(topology):
    phases = (0.3,) if topology == "small" else (0.3, 0.4, 0.5)
    c = compute_coefficients(two_atom_layout(topology, phases, 0.0, 0.0))
    for arr in (c.delta_omega, c.gamma, c.g, c.gamma_coll, c.amp_right, c.amp_left):
        assert np.all(arr == 0)


@pytest.mark.parametrize("topology", TOPOLOGIES)
def test_tables_with_random_rates(topology):
    rng = np.random.default_rng(TOPOLOGIES.index(topology))
    n = 2 if topology == "small" else 4
    for _ in range(20):
        phases = rng.uniform(0, 2 * PI, n - 1)
        gr, gl = rng.uniform(0, 1, n), rng.uniform(0, 1, n)
        for row in check_coefficient_rows(topology, phases, gr, gl):
            assert row.passed, row
        for row in check_coefficient_rows(topology, phases, [gr[0]] * n, [gl[0]] * n):
            assert row.passed, row


def test_single_small_atom_model():
    layout = make_layout("a", "a", [], 0.3, 0.6, frequencies={"a": 1.2})
    me = assemble_model(compute_coefficients(layout))
    sm = lowering(0, 1)
    assert np.allclose(me.H, 0.6 * sigma_z(0, 1))
    assert np.allclose(me.collapse_ops[0], math.sqrt(0.3) * sm)
    assert np.allclose(me.collapse_ops[1], math.sqrt(0.6) * sm)


def test_driven_small_atom_rabi_term():
    beta = 0.4 - 0.1j
    layout = make_layout("a", "a", [], 0.8, 0.2)
    c = compute_coefficients(layout)
    omega = 2 * beta * math.sqrt(0.8)
    assert rabi_frequencies(c, DriveSpec(beta))[0] == pytest.approx(omega)
    me = assemble_model(c, DriveSpec(beta))
    sm = lowering(0, 1)
    expected = -0.5j * (omega * dagger(sm) - np.conj(omega) * sm)
    assert np.allclose(me.H, expected)


def test_beta_for_rabi_inverts():
    c = compute_coefficients(two_atom_layout("nested", (0.1, 0.2, 0.3), 0.3, 0.5))
    drive = beta_for_rabi(c, 0.7)
    assert rabi_frequencies(c, drive)[0] == pytest.approx(0.7)
    c0 = compute_coefficients(two_atom_layout("small", (0.0,), 0.0, 0.5))
    with pytest.raises(ValueError):
        beta_for_rabi(c0, 1.0)


def test_coincident_points_have_no_exchange():
    points = [ConnectionPoint("a", 0, 0.3, 0.5), ConnectionPoint("b", 0, 0.2, 0.7)]
    c = compute_coefficients(validate(Layout([Atom("a"), Atom("b")], points, [0.0])))
    assert c.g[0, 1] == 0
    assert c.gamma_coll[0, 1] == pytest.approx(math.sqrt(0.06) + math.sqrt(0.35))


def _random_layout(rng, n_atoms, max_points=2):
    names = [chr(ord("a") + i) for i in range(n_atoms)]
    order = [n for n in names for _ in range(rng.integers(1, max_points + 1))]
    rng.shuffle(order)
    n = len(order)
    return make_layout(
        names,
        order,
        rng.uniform(0, 2 * PI, n - 1),
        rng.uniform(0, 1, n),
        rng.uniform(0, 1, n),
        frequencies={a: rng.uniform(-1, 1) for a in names},
    )


@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_structural_invariants(n_atoms, seed):
    c = compute_coefficients(_random_layout(np.random.default_rng(seed), n_atoms))
    ar, al = c.amp_right, c.amp_left
    assert np.allclose(c.gamma, np.abs(ar) ** 2 + np.abs(al) ** 2, atol=1e-10)
    assert np.all(c.gamma >= -1e-12)
    for j in range(n_atoms):
        for k in range(j + 1, n_atoms):
            expected = ar[j] * np.conj(ar[k]) + al[j] * np.conj(al[k])
            assert c.gamma_coll[j, k] == pytest.approx(expected, abs=1e-10)
    me = assemble_model(c)
    assert np.linalg.norm(me.H - dagger(me.H)) <= 1e-12


@given(st.integers(1, 3), st.integers(0, 2**32 - 1), st.booleans())
def test_oracle_random_layouts(n_atoms, seed, driven):
    rng = np.random.default_rng(seed)
    layout = _random_layout(rng, n_atoms)
    drive = DriveSpec(complex(*rng.normal(size=2))) if driven else None
    assert max(oracle_deviation(layout, drive).values()) <= 1e-10


@given(st.integers(0, 2**32 - 1))
def test_pair_coefficients_ignore_other_atoms(seed):
    rng = np.random.default_rng(seed)
    full = _random_layout(rng, 3)
    c_full = compute_coefficients(full)
    # drop atom c and merge the phases across its points
    keep = [i for i, p in enumerate(full.points) if p.owner != "c"]
    phases = [math.fsum(full.phases[a:b]) for a, b in zip(keep, keep[1:])]
    reduced = validate(
        Layout(full.atoms[:2], [full.points[i] for i in keep], phases)
    )
    c_red = compute_coefficients(reduced)
    assert c_full.g[0, 1] == pytest.approx(c_red.g[0, 1], abs=1e-12)
    assert c_full.gamma_coll[0, 1] == pytest.approx(c_red.gamma_coll[0, 1], abs=1e-12)
    assert np.allclose(c_full.gamma[:2], c_red.gamma, atol=1e-12)
    assert np.allclose(c_full.delta_omega[:2], c_red.delta_omega, atol=1e-12)


@pytest.mark.parametrize(
    "topology, phases",
    [
        ("small", (0.0,)),
        ("separate", (PI / 3, -PI / 3, PI / 3)),
        ("nested", (0.0, 2 * PI / 3, 0.0)),
        ("braided", (PI, PI / 2, PI)),
    ],
)
def test_exchange_real_under_dark_conditions(topology, phases):
    c = compute_coefficients(two_atom_layout(topology, phases, 0.5, 0.5))
    assert abs(c.g[0, 1].imag) < 1e-12
