import math

import numpy as np
import pytest

from chiralwg.analysis import (
    DRIVEN_DS,
    DRIVEN_DT,
    OTHER,
    SINGLET,
    TRIPLET,
    TRIVIAL,
    NoDrivenDarkState,
    SplitSpec,
    bright_decay_rates,
    bright_partner,
    check_dfi,
    driven_dark_state,
    find_dark_states,
    multi_atom_dark_conditions,
    nontrivial,
    numeric_populating_rate,
    populating_rate,
    rate_comparison_sweep,
    singlet,
    triplet,
    verify_splitting_invariance,
    xi_coupling,
)
from chiralwg.analysis.dark import classify
from chiralwg.coefficients import CoefficientSet, assemble_model, beta_for_rabi, compute_coefficients
from chiralwg.hilbert import fidelity, ket, normalize
from chiralwg.setups import (
    TOPOLOGIES,
    driven_phases,
    enclosed_braided_layout,
    matryoshka_layout,
    two_atom_layout,
)
from chiralwg.slh import DriveSpec
from chiralwg.tables import check_rate_rows
from chiralwg.topology import make_layout

PI = math.pi


def coeffs_for(topology, phases, gr=0.5, gl=0.5, freqs=(1.0, 1.0), detunings=(0.0, 0.0)):
    return compute_coefficients(two_atom_layout(topology, phases, gr, gl, freqs, detunings))


def fake_pair(omega_a, omega_b, g):
    z = np.zeros((2, 2), dtype=complex)
    gm = z.copy()
    gm[0, 1] = g
    return CoefficientSet(
        names=("a", "b"),
        frequency=np.array([omega_a, omega_b]),
        detuning=np.zeros(2),
        delta_omega=np.zeros(2),
        g=gm,
        gamma=np.zeros(2),
        gamma_coll=z,
        amp_right=np.zeros(2, dtype=complex),
        amp_left=np.zeros(2, dtype=complex),
        total_phase=0.0,
    )


# decoherence-free interaction


def test_dfi_chiral_braided():
    r = check_dfi(coeffs_for("braided", (PI / 2,) * 3, 0.9, 0.1))
    assert r.is_dfi
    assert abs(r.residual_g[("a", "b")]) == pytest.approx(1.0, abs=1e-12)
    assert r.max_individual_decay <= 1e-12 and r.max_collective_decay <= 1e-12


def test_dfi_needs_nonzero_exchange():
    r = check_dfi(coeffs_for("braided", (0.0, PI, 0.0)))
    assert r.max_individual_decay <= 1e-12 and r.max_collective_decay <= 1e-12
    assert not r.is_dfi
    assert abs(r.residual_g[("a", "b")]) <= 1e-12


def test_dfi_separate_with_decoupled_atom():
    r = check_dfi(coeffs_for("separate", (0.4, 1.3, PI)))
    assert abs(r.residual_g[("a", "b")]) <= 1e-12
    assert not r.is_dfi


def test_dfi_reports_near_miss():
    r = check_dfi(coeffs_for("braided", (PI / 2 + 0.01, PI / 2, PI / 2)))
    assert not r.is_dfi
    assert abs(r.residual_g[("a", "b")]) > 0.5
    with pytest.raises(ValueError):
        check_dfi(coeffs_for("small", (0.0,)), tol=0.0)


# xi and rates


def test_xi_coupling_examples():
    assert xi_coupling(fake_pair(1.0, 1.0, 0.3)) == 0
    assert xi_coupling(fake_pair(1.0, 1.4, 0.3)) == pytest.approx(0.2)
    assert xi_coupling(fake_pair(1.0, 1.0, 0.3j)) == pytest.approx(0.3j)
    layout = make_layout("abc", "abc", [0.0, 0.0])
    with pytest.raises(ValueError):
        xi_coupling(compute_coefficients(layout))


def test_bright_decay_rates():
    c = coeffs_for("small", (0.0,))
    gs, gt = bright_decay_rates(c)
    assert gs == pytest.approx(0.0, abs=1e-12)
    assert gt == pytest.approx(c.gamma.sum())
    c = coeffs_for("small", (PI / 2,), 0.5, 0.5)
    assert abs(c.gamma_coll[0, 1].real) < 1e-12
    gs, gt = bright_decay_rates(c)
    assert gs == pytest.approx(gt) == pytest.approx(c.gamma.sum() / 2)
    c = coeffs_for("nested", (0.0, 2 * PI / 3, 0.0), 0.2, 0.8)
    gs, gt = bright_decay_rates(c)
    assert gs == pytest.approx(0.0, abs=1e-12) and gt == pytest.approx(c.gamma.sum())


# undriven dark states


def test_nested_chiral_singlet():
    me = assemble_model(coeffs_for("nested", (0.0, 2 * PI / 3, 0.0), 0.2, 0.8))
    reports = find_dark_states(me)
    found = nontrivial(reports)
    assert [r.kind for r in found] == [SINGLET]
    assert any(r.kind == TRIVIAL for r in reports)
    s = found[0]
    assert fidelity(s.state, singlet()) > 1 - 1e-12
    assert s.gamma_s == pytest.approx(0.0, abs=1e-12)


def test_unidirectional_small_atoms_have_no_dark_state():
    for phi in np.linspace(0, 2 * PI, 7):
        me = assemble_model(coeffs_for("small", (phi,), 1.0, 0.0))
        assert nontrivial(find_dark_states(me)) == []


def test_reports_satisfy_dark_conditions():
    tol = 1e-9
    for topology, phases in [("small", (0.0,)), ("braided", (PI, 0.3, PI)), ("separate", (0.2, -0.2, 0.2))]:
        me = assemble_model(coeffs_for(topology, phases))
        h = np.linalg.norm(me.H, 2)
        for r in find_dark_states(me, tol):
            for L in me.collapse_ops:
                assert np.linalg.norm(L @ r.state) <= 10 * tol
            assert np.linalg.norm(me.H @ r.state - r.eigenvalue * r.state) <= 10 * tol * max(1.0, h)
            assert abs(np.linalg.norm(r.state) - 1) < 1e-12


def test_triplet_classified():
    me = assemble_model(coeffs_for("braided", (PI, PI / 2, PI)))
    assert [r.kind for r in nontrivial(find_dark_states(me))] == [TRIPLET]


def test_decoupled_layout_flagged():
    me = assemble_model(coeffs_for("small", (0.0,), 0.0, 0.0))
    reports = find_dark_states(me)
    assert all(r.decoupled for r in reports)
    assert reports[0].kernel_dimension == 4


def test_classify_labels():
    assert classify(ket("gg"), 2, driven=False)[0] == TRIVIAL
    assert classify(singlet(), 2, driven=False)[0] == SINGLET
    assert classify(normalize(ket("eg") + 2 * ket("ge")), 2, driven=False)[0] == OTHER
    kind, alpha = classify(normalize(0.5 * triplet() + ket("gg")), 2, driven=True)
    assert kind == DRIVEN_DT and alpha == pytest.approx(0.5)


def test_matryoshka_subspace_and_enclosed_state():
    reports = nontrivial(find_dark_states(assemble_model(compute_coefficients(matryoshka_layout(3)))))
    golden = normalize(ket("egg") + ket("geg") - 2 * ket("gge"))
    span = np.column_stack([r.state for r in reports])
    assert np.linalg.norm(span @ (span.conj().T @ golden)) == pytest.approx(1.0, abs=1e-12)
    reports = nontrivial(find_dark_states(assemble_model(compute_coefficients(enclosed_braided_layout()))))
    assert len(reports) == 1
    assert fidelity(reports[0].state, normalize(2 * ket("eg") - 3 * ket("ge"))) > 1 - 1e-12


# multi-atom sufficient conditions


def test_conditions_hold_for_golden_layouts():
    for layout in (matryoshka_layout(3), enclosed_braided_layout()):
        report = multi_atom_dark_conditions(compute_coefficients(layout))
        assert report.all_hold
        assert not report.all_dark


def test_conditions_fail_for_unidirectional_small():
    report = multi_atom_dark_conditions(coeffs_for("small", (0.0,), 1.0, 0.0))
    assert not report.amplitude_ratio
    assert not report.eigenstate


def test_conditions_all_dark_when_decoupled():
    report = multi_atom_dark_conditions(coeffs_for("small", (0.0,), 0.0, 0.0))
    assert report.all_dark and report.amplitude_ratio


# driven dark states


def driven(topology, dark, gr=0.25, gl=0.75, delta=0.5, omega=1.0, phi2=PI / 3):
    c = coeffs_for(topology, driven_phases(topology, dark, phi2), gr, gl, (0.0, 0.0), (delta, -delta))
    return c, beta_for_rabi(c, omega)


@pytest.mark.parametrize("topology", TOPOLOGIES)
@pytest.mark.parametrize("dark", ["S", "T"])
def test_driven_dark_state_per_topology(topology, dark):
    c, drive = driven(topology, dark)
    r = driven_dark_state(c, drive)
    assert r.kind == (DRIVEN_DS if dark == "S" else DRIVEN_DT)
    me = assemble_model(c, drive)
    for L in me.collapse_ops:
        assert np.linalg.norm(L @ r.state) <= 1e-12
    assert np.linalg.norm(me.H @ r.state - r.eigenvalue * r.state) <= 1e-12
    xi = xi_coupling(c, driven=True)
    assert abs(r.alpha) == pytest.approx(math.sqrt(2) / (2 * abs(xi)), rel=1e-12)
    assert r.gamma_d == pytest.approx(populating_rate(topology, 0.25, 0.75, 0.5, omega=1.0, phi2=PI / 3, dark=dark))
    # the finder sees the same state
    found = [x for x in find_dark_states(me) if x.kind == r.kind]
    assert len(found) == 1 and fidelity(found[0].state, r.state) > 1 - 1e-12
    assert found[0].alpha == pytest.approx(r.alpha)


def test_small_atom_table_value():
    c, drive = driven("small", "S")
    assert driven_dark_state(c, drive).gamma_d == pytest.approx(0.76923, abs=5e-6)
    assert populating_rate("small", 0.25, 0.75, 0.5, omega=1.0) == pytest.approx(2 * 1.25 / 3.25)


def test_zero_drive_limit():
    c, _ = driven("small", "S")
    r = driven_dark_state(c, beta_for_rabi(c, 1e-9))
    assert abs(r.alpha) < 1e-8
    assert fidelity(r.state, ket("gg")) > 1 - 1e-15
    assert r.gamma_d == pytest.approx(c.gamma.sum())


def test_nested_needs_detuning():
    c, drive = driven("nested", "S", delta=0.0)
    with pytest.raises(NoDrivenDarkState):
        driven_dark_state(c, drive)


def test_detunings_must_be_opposite():
    c = coeffs_for("small", (0.0,), 0.25, 0.75, (0.0, 0.0), (0.5, 0.4))
    with pytest.raises(NoDrivenDarkState):
        driven_dark_state(c, DriveSpec(1.0))


def test_driven_requires_two_atoms():
    c = compute_coefficients(make_layout("abc", "abc", [0.0, 0.0]))
    with pytest.raises(ValueError):
        driven_dark_state(c, DriveSpec(1.0))


def test_bright_partner():
    assert np.allclose(bright_partner(DRIVEN_DS), triplet())
    assert np.allclose(bright_partner(DRIVEN_DT), singlet())
    with pytest.raises(ValueError):
        bright_partner(SINGLET)


# populating rates


def test_rate_rows_match_model():
    for row in check_rate_rows(0.3, 0.6, 0.4, 0.8):
        assert row.passed, row


@pytest.mark.parametrize("topology", TOPOLOGIES)
def test_beta_form_matches_model(topology):
    for dark in ("S", "T"):
        closed = populating_rate(topology, 0.3, 0.6, 0.4, beta=0.7, phi2=PI / 3, dark=dark)
        numeric = numeric_populating_rate(topology, 0.3, 0.6, 0.4, beta=0.7, phi2=PI / 3, dark=dark)
        assert closed == pytest.approx(numeric, rel=1e-10)


def test_populating_rate_arguments():
    with pytest.raises(ValueError):
        populating_rate("small", 0.5, 0.5, 0.1)
    with pytest.raises(ValueError):
        populating_rate("small", 0.5, 0.5, 0.1, omega=1.0, beta=1.0)
    with pytest.raises(ValueError):
        populating_rate("ring", 0.5, 0.5, 0.1, omega=1.0)


def test_small_sweep_report():
    report = rate_comparison_sweep(300, seed=4)
    assert report.bound_holds
    assert report.n_points == 300
    assert report.worst_point["topology"] in ("separate", "nested", "braided")


def test_numeric_sweep_agrees_with_closed_form():
    closed = rate_comparison_sweep(40, seed=9)
    numeric = rate_comparison_sweep(40, seed=9, numeric=True)
    assert numeric.max_giant_over_small == pytest.approx(closed.max_giant_over_small, rel=1e-8)


# splitting


def test_splitting_invariance_cases():
    layout = two_atom_layout("braided", (0.0, 0.0, 0.0), 0.5, 0.5)
    ninth = [(0.5 / 9, 0.5 / 9)] * 3
    assert verify_splitting_invariance(layout, SplitSpec(3, ninth))
    assert verify_splitting_invariance(layout, SplitSpec(3, [(0.5, 0.5)]))
    assert not verify_splitting_invariance(layout, SplitSpec(3, [(0.08, 0.08)] * 2))
    # (sqrt(g/4) + sqrt(g/4))^2 = g, so this split keeps the state
    assert verify_splitting_invariance(layout, SplitSpec(3, [(0.125, 0.125)] * 2))
