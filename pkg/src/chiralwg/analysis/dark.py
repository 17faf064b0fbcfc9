"""Dark states: pure states annihilated by every collapse operator that are
also eigenstates of the Hamiltonian."""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass

import numpy as np

from ..dynamics import MasterEquation
from ..hilbert import dagger, fidelity, fix_phase, ground_state, ket, sigma_z

CLASS_FIDELITY = 1.0 - 1e-8
DEFAULT_TOL = 1e-9

SINGLET = "Singlet"
TRIPLET = "Triplet"
DRIVEN_DS = "DrivenDS"
DRIVEN_DT = "DrivenDT"
TRIVIAL = "Trivial"
OTHER = "Other"


def singlet():
    return (ket("ge") - ket("eg")) / math.sqrt(2.0)


def triplet():
    return (ket("ge") + ket("eg")) / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class DarkStateReport:
    state: np.ndarray
    eigenvalue: float
    kind: str
    alpha: complex | None = None
    gamma_d: float | None = None
    gamma_s: float | None = None
    gamma_t: float | None = None
    xi: complex | None = None
    kernel_dimension: int = 0
    decoupled: bool = False

    @property
    def nontrivial(self):
        return self.kind != TRIVIAL


@lru_cache(maxsize=16)
def excitation_number(n_atoms):
    dim = 2**n_atoms
    num = np.zeros((dim, dim), dtype=complex)
    for j in range(n_atoms):
        num += 0.5 * (np.eye(dim) + sigma_z(j, n_atoms))
    num.flags.writeable = False
    return num


def _kernel(m, atol):
    """Columns spanning {v : |m v| <= atol}."""
    n = m.shape[1]
    if m.size == 0 or n == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s > atol))
    return vh[rank:].conj().T


def invariant_dark_subspace(me: MasterEquation, tol=DEFAULT_TOL, basis=None):
    """Largest H-invariant subspace inside the joint kernel of the collapse operators.

    Starting from the kernel K, directions that H maps out of K are removed
    until ``(1 - K K^dag) H K`` vanishes. `basis` optionally restricts the
    search to the span of its columns. Returns the subspace as orthonormal
    columns.
    """
    H = me.H
    d = me.dim
    stacked = np.vstack(me.collapse_ops) if me.collapse_ops else np.zeros((0, d))
    if basis is None:
        basis = np.eye(d, dtype=complex)
    scale_l = max(1.0, np.linalg.norm(stacked, 2)) if stacked.size else 1.0
    K = basis @ _kernel(stacked @ basis, tol * scale_l)
    h_scale = max(1.0, np.linalg.norm(H, 2))
    for _ in range(d + 1):
        if K.shape[1] == 0:
            break
        leak = H @ K - K @ (dagger(K) @ H @ K)
        if np.linalg.norm(leak, 2) <= tol * h_scale:
            break
        K = K @ _kernel(leak, tol * h_scale)
    return K


def _sectors(me: MasterEquation, conserving):
    """Excitation-number blocks when H conserves excitations, else one block."""
    if not conserving:
        return [np.eye(me.dim, dtype=complex)]
    num = excitation_number(me.n_atoms)
    levels = np.real(np.diag(num)).round().astype(int)
    return [np.eye(me.dim, dtype=complex)[:, levels == n] for n in range(me.n_atoms + 1)]


def two_atom_rates(me: MasterEquation):
    """(Gamma_S, Gamma_T, xi) read off the model of two atoms."""
    S, T = singlet(), triplet()
    gs = sum(np.linalg.norm(L @ S) ** 2 for L in me.collapse_ops)
    gt = sum(np.linalg.norm(L @ T) ** 2 for L in me.collapse_ops)
    xi = complex(np.vdot(S, me.H @ T))
    return float(gs), float(gt), xi


def classify(state, n_atoms, driven):
    """Label a normalized state; returns (kind, alpha)."""
    if not driven and fidelity(ground_state(n_atoms), state) > CLASS_FIDELITY:
        return TRIVIAL, None
    if n_atoms != 2:
        return OTHER, None
    S, T, gg = singlet(), triplet(), ket("gg")
    if fidelity(S, state) > CLASS_FIDELITY:
        return SINGLET, None
    if fidelity(T, state) > CLASS_FIDELITY:
        return TRIPLET, None
    c_gg = np.vdot(gg, state)
    for kind, partner in ((DRIVEN_DS, S), (DRIVEN_DT, T)):
        c = np.vdot(partner, state)
        if abs(c) ** 2 + abs(c_gg) ** 2 > CLASS_FIDELITY and abs(c_gg) > 1e-12:
            return kind, complex(c / c_gg)
    return OTHER, None


def find_dark_states(me: MasterEquation, tol=DEFAULT_TOL, driven=None):
    """All dark states of `me`, one report per eigenvector of H on the dark subspace.

    `driven` selects the classification scheme; by default a model whose H
    does not conserve the excitation number is treated as driven. The
    ground state is reported as Trivial for undriven models.
    """
    conserving = _conserves(me)
    sectors = _sectors(me, conserving)
    if driven is None:
        driven = not conserving
    decoupled = all(np.linalg.norm(L) <= tol for L in me.collapse_ops)
    blocks = [invariant_dark_subspace(me, tol, basis=b) for b in sectors]
    kdim = sum(b.shape[1] for b in blocks)
    gamma_s = gamma_t = xi = None
    if me.n_atoms == 2:
        gamma_s, gamma_t, xi = two_atom_rates(me)

    reports = []
    for K in blocks:
        if K.shape[1] == 0:
            continue
        evals, evecs = np.linalg.eigh(0.5 * (dagger(K) @ me.H @ K + dagger(dagger(K) @ me.H @ K)))
        for mu, u in zip(evals, evecs.T):
            v = fix_phase(K @ u)
            v = v / np.linalg.norm(v)
            if np.linalg.norm(me.H @ v - mu * v) > tol * max(1.0, np.linalg.norm(me.H, 2)):
                continue
            kind, alpha = classify(v, me.n_atoms, driven)
            gamma_d = None
            if alpha is not None:
                gamma_d = (gamma_s + gamma_t) / (1.0 + abs(alpha) ** 2)
            reports.append(
                DarkStateReport(
                    state=v,
                    eigenvalue=float(mu),
                    kind=kind,
                    alpha=alpha,
                    gamma_d=gamma_d,
                    gamma_s=gamma_s,
                    gamma_t=gamma_t,
                    xi=xi,
                    kernel_dimension=kdim,
                    decoupled=decoupled,
                )
            )
    return reports


def _conserves(me):
    num = excitation_number(me.n_atoms)
    return np.linalg.norm(me.H @ num - num @ me.H) <= 1e-12 * max(1.0, np.linalg.norm(me.H))


def nontrivial(reports):
    return [r for r in reports if r.nontrivial]


def dark_span(reports):
    """Orthonormal columns spanning the nontrivial states of `reports`."""
    vecs = [r.state for r in nontrivial(reports)]
    if not vecs:
        return None
    q, _ = np.linalg.qr(np.column_stack(vecs))
    return q


def span_fidelity(state, span):
    """Squared norm of the projection of `state` onto the column span."""
    if span is None:
        return 0.0
    return float(np.linalg.norm(dagger(span) @ state) ** 2)
