"""Dense linear algebra over the 2^N space of N two-level atoms.

Per-atom basis ordering is ``|e>`` (index 0) then ``|g>`` (index 1), and
atom 0 is the leftmost tensor factor, so the ket ``|eg>`` of two atoms has
index 1 and ``|gg...g>`` is always the last basis vector.
"""
from __future__ import annotations

from functools import lru_cache, reduce

import numpy as np

MAX_ATOMS = 10

SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |g><e|
SIGMA_PLUS = SIGMA_MINUS.conj().T
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


class NonHermitianError(ValueError):
    pass


def _check_n_atoms(n_atoms):
    if not 1 <= n_atoms <= MAX_ATOMS:
        raise ValueError(f"n_atoms must be in [1, {MAX_ATOMS}], got {n_atoms}")


def embed_operator(local_op, site, n_atoms):
    """Return ``I x ... x local_op x ... x I`` with `local_op` at `site`."""
    _check_n_atoms(n_atoms)
    if not 0 <= site < n_atoms:
        raise IndexError(f"site {site} out of range for {n_atoms} atoms")
    local_op = np.asarray(local_op, dtype=complex)
    if local_op.shape != (2, 2):
        raise ValueError("local_op must be 2x2")
    left = np.eye(2**site, dtype=complex)
    right = np.eye(2 ** (n_atoms - site - 1), dtype=complex)
    return np.kron(np.kron(left, local_op), right)


def tensor(*ops):
    return reduce(np.kron, [np.asarray(op, dtype=complex) for op in ops])


@lru_cache(maxsize=256)
def _cached(kind, site, n_atoms):
    op = embed_operator(SIGMA_MINUS if kind == "minus" else SIGMA_Z, site, n_atoms)
    op.flags.writeable = False
    return op


def lowering(site, n_atoms):
    """sigma_- of atom `site` (read-only, shared between calls)."""
    return _cached("minus", site, n_atoms)


def sigma_z(site, n_atoms):
    """sigma_z of atom `site` (read-only, shared between calls)."""
    return _cached("z", site, n_atoms)


def basis_index(label):
    """Index of a canonical ket given as a string of 'e'/'g' letters."""
    index = 0
    for ch in label:
        if ch not in "eg":
            raise ValueError(f"ket label must contain only 'e' and 'g': {label!r}")
        index = 2 * index + (ch == "g")
    return index


def basis_label(index, n_atoms):
    bits = format(index, f"0{n_atoms}b")
    return bits.replace("0", "e").replace("1", "g")


def ket(label):
    _check_n_atoms(len(label))
    v = np.zeros(2 ** len(label), dtype=complex)
    v[basis_index(label)] = 1.0
    return v


def ground_state(n_atoms):
    return ket("g" * n_atoms)


def normalize(v):
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / norm


def fix_phase(v, threshold=1e-8):
    """Rotate `v` so its first amplitude above `threshold` is real positive."""
    v = np.asarray(v, dtype=complex)
    for amp in v:
        if abs(amp) > threshold:
            return v * (abs(amp) / amp)
    return v


def projector(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def fidelity(u, v):
    """|<u|v>|^2 for normalized pure states."""
    return float(abs(np.vdot(u, v)) ** 2)


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def null_space(m, tol=1e-10):
    """Orthonormal basis of the numerical kernel of `m`.

    Right-singular vectors whose singular value is at most ``tol`` times the
    largest singular value are kept. `m` may be rectangular. Returns a list of
    1-D arrays (empty when the kernel is trivial).
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    n = m.shape[1]
    if m.size == 0:
        return [row for row in np.eye(n, dtype=complex)]
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return [row for row in np.eye(n, dtype=complex)]
    rank = int(np.sum(s > tol * smax))
    return [vh[i].conj() for i in range(rank, n)]


def null_space_matrix(m, tol=1e-10):
    """Same as :func:`null_space` but with the basis vectors as columns."""
    basis = null_space(m, tol)
    n = np.atleast_2d(m).shape[1]
    if not basis:
        return np.zeros((n, 0), dtype=complex)
    return np.column_stack(basis)


def eigh(m):
    m = np.asarray(m, dtype=complex)
    scale = np.linalg.norm(m)
    if np.linalg.norm(m - dagger(m)) > 1e-10 * max(scale, 1e-300):
        raise NonHermitianError("matrix is not Hermitian")
    return np.linalg.eigh(0.5 * (m + dagger(m)))
