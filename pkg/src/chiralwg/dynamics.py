"""Lindblad dynamics: right-hand side, adaptive integration, steady states."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .hilbert import basis_label, dagger, null_space

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-8
PURITY_TOL = 1e-10
MAX_STEADY_STATE_DIM = 2**6


class StepSizeUnderflow(RuntimeError):
    pass


class InvariantViolated(RuntimeError):
    pass


class DegenerateSteadyState(RuntimeError):
    """The Liouvillian kernel has more than one dimension.

    `basis` holds the kernel as a list of (not trace-normalized) matrices.
    """

    def __init__(self, basis):
        self.basis = basis
        super().__init__(f"steady state is not unique: kernel dimension {len(basis)}")


@dataclass(frozen=True, eq=False)
class MasterEquation:
    H: np.ndarray
    collapse_ops: tuple

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        ops = tuple(np.asarray(L, dtype=complex) for L in self.collapse_ops)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError("H must be square")
        for L in ops:
            if L.shape != H.shape:
                raise ValueError("collapse operators must match the Hamiltonian dimension")
        scale = max(1.0, np.linalg.norm(H))
        if np.linalg.norm(H - dagger(H)) > HERMITIAN_TOL * scale:
            raise ValueError("H is not Hermitian")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "collapse_ops", ops)

    @property
    def dim(self):
        return self.H.shape[0]

    @property
    def n_atoms(self):
        return int(round(np.log2(self.dim)))

    def effective_hamiltonian(self):
        """H - (i/2) sum_k L_k^dag L_k."""
        heff = self.H.copy()
        for L in self.collapse_ops:
            heff -= 0.5j * dagger(L) @ L
        return heff

    def stacked_collapse(self):
        return np.array(self.collapse_ops).reshape(-1, self.dim, self.dim)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    observables: dict = field(default_factory=dict)
    error_estimate: float = 0.0
    n_steps: int = 0
    n_rejected: int = 0


def lindblad_rhs(me: MasterEquation, rho) -> np.ndarray:
    """-i[H, rho] + sum_k D[L_k] rho."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != me.H.shape:
        raise ValueError(f"density matrix shape {rho.shape} does not match {me.H.shape}")
    out = -1j * (me.H @ rho - rho @ me.H)
    for L in me.collapse_ops:
        Ld = dagger(L)
        LdL = Ld @ L
        out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def check_density_matrix(rho, trace_tol=TRACE_TOL, positivity_tol=POSITIVITY_TOL):
    """Raise InvariantViolated unless `rho` is a valid density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if np.linalg.norm(rho - dagger(rho)) > HERMITIAN_TOL * max(1.0, np.linalg.norm(rho)):
        raise InvariantViolated("density matrix is not Hermitian")
    drift = abs(np.trace(rho) - 1.0)
    if drift > trace_tol:
        raise InvariantViolated(f"trace drifted by {drift:.3e}")
    herm = 0.5 * (rho + dagger(rho))
    lam_min = np.linalg.eigvalsh(herm)[0]
    if lam_min < -positivity_tol:
        raise InvariantViolated(f"negative eigenvalue {lam_min:.3e}")
    purity = float(np.real(np.trace(herm @ herm)))
    if purity > 1.0 + PURITY_TOL:
        raise InvariantViolated(f"purity {purity!r} exceeds one")


def population_observables(n_atoms):
    """Projectors onto the canonical kets, keyed ``P_<label>``."""
    dim = 2**n_atoms
    obs = {}
    for i in range(dim):
        proj = np.zeros((dim, dim), dtype=complex)
        proj[i, i] = 1.0
        obs[f"P_{basis_label(i, n_atoms)}"] = proj
    return obs


def evolve(
    me: MasterEquation,
    rho0,
    t_final: float,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-10,
    sample_times: Sequence[float] | None = None,
    observables: Mapping[str, np.ndarray] | None = None,
    backend: str | None = None,
    max_steps: int = 10_000_000,
) -> Trajectory:
    """Integrate the master equation from ``t = 0`` to `t_final`.

    Uses the Dormand-Prince 5(4) pair with step control on the max-norm of the
    local error estimate. States are re-Hermitized and checked at every sample
    time. `observables` maps names to operators whose expectation values are
    recorded; canonical-ket populations are always included.
    """
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    if not t_final > 0:
        raise ValueError("t_final must be positive")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != me.H.shape:
        raise ValueError("initial state does not match the model dimension")
    check_density_matrix(rho0)

    if sample_times is None:
        sample_times = np.linspace(0.0, t_final, 101)
    times = np.asarray(sample_times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("sample_times must be a non-empty 1-D sequence")
    if np.any(np.diff(times) < 0) or times[0] < 0 or times[-1] > t_final * (1 + 1e-12):
        raise ValueError("sample_times must be ascending within [0, t_final]")

    core = kernels.get_backend(backend)
    heff = me.effective_hamiltonian()
    lops = me.stacked_collapse()
    rate_scale = np.linalg.norm(heff, 2) + sum(np.linalg.norm(L, 2) ** 2 for L in lops)
    h_init = min(t_final, 0.01 / max(rate_scale, 1e-12))

    states, status, n_acc, n_rej, err_sum = core.integrate(
        heff, lops, rho0, times, rel_tol, abs_tol, h_init, max_steps
    )
    if status == core.STEP_UNDERFLOW:
        raise StepSizeUnderflow("step size fell below the resolvable minimum")
    if status == core.MAX_STEPS:
        raise StepSizeUnderflow(f"no convergence within {max_steps} steps")

    states = 0.5 * (states + dagger(states))
    for rho in states:
        check_density_matrix(rho)

    obs = population_observables(me.n_atoms)
    if observables:
        obs.update(observables)
    series = {
        name: np.real(np.einsum("ij,tji->t", op, states)) for name, op in obs.items()
    }
    return Trajectory(times, states, series, err_sum, n_acc, n_rej)


def liouvillian(me: MasterEquation) -> np.ndarray:
    """Matrix of rho -> lindblad_rhs(rho) acting on row-major vec(rho)."""
    d = me.dim
    eye = np.eye(d, dtype=complex)
    H = me.H
    # row-major vec: vec(A X B) = (A kron B^T) vec(X)
    sup = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for L in me.collapse_ops:
        LdL = dagger(L) @ L
        sup += np.kron(L, L.conj()) - 0.5 * (np.kron(LdL, eye) + np.kron(eye, LdL.T))
    return sup


def steady_state(me: MasterEquation, tol: float = 1e-9) -> np.ndarray:
    """Unique stationary density matrix from the kernel of the Liouvillian."""
    if me.dim > MAX_STEADY_STATE_DIM:
        raise ValueError(f"steady_state supports at most {MAX_STEADY_STATE_DIM} levels")
    d = me.dim
    kernel = null_space(liouvillian(me), tol)
    if len(kernel) != 1:
        if not kernel:
            raise RuntimeError("Liouvillian has no kernel at this tolerance")
        raise DegenerateSteadyState([v.reshape(d, d) for v in kernel])
    rho = kernel[0].reshape(d, d)
    rho = rho / np.trace(rho)
    return 0.5 * (rho + dagger(rho))
