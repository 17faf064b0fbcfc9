"""Time the compiled and pure-Python Lindblad integrators on braided chains.

Only the backend ``integrate`` call is timed; the density-matrix checks that
``dynamics.evolve`` runs afterwards are the same for both backends.

    python benchmarks/bench_kernels.py [--repeat 3] [--max-atoms 4]
"""
import argparse
import math
import time

import numpy as np

from chiralwg import kernels
from chiralwg.coefficients import assemble_model, compute_coefficients
from chiralwg.dynamics import evolve
from chiralwg.hilbert import ket, projector
from chiralwg.topology import make_layout


def chain(n_atoms):
    """Braided chain a b a c b c ... with random phases and rates."""
    names = [chr(ord("a") + i) for i in range(n_atoms)]
    order = names[0]
    for prev, nxt in zip(names, names[1:]):
        order += nxt + prev
    order += names[-1]
    if n_atoms == 1:
        order = "aa"
    rng = np.random.default_rng(n_atoms)
    n = len(order)
    return make_layout(
        names,
        order,
        rng.uniform(0, 2 * math.pi, n - 1),
        rng.uniform(0.1, 1, n),
        rng.uniform(0.1, 1, n),
        frequencies={a: 1.0 for a in names},
    )


def bench(n_atoms, backend, repeat):
    me = assemble_model(compute_coefficients(chain(n_atoms)))
    rho0 = projector(ket("e" + "g" * (n_atoms - 1)))
    core = kernels.get_backend(backend)
    heff = me.effective_hamiltonian()
    lops = me.stacked_collapse()
    times = np.linspace(0.0, 5.0, 101)
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        states, status, n_acc, _, _ = core.integrate(heff, lops, rho0, times, 1e-8, 1e-10, 1e-3, 10**7)
        best = min(best, time.perf_counter() - t0)
    # the full driver must agree with the raw kernel
    traj = evolve(me, rho0, 5.0, sample_times=times, backend=backend)
    assert np.allclose(traj.states[-1], states[-1], atol=1e-8)
    return best, n_acc, states[-1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-atoms", type=int, default=4)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'N':>2} {'steps':>6} " + " ".join(f"{b + ' [ms]':>14}" for b in backends) + "   speedup  max|diff|")
    for n in range(1, args.max_atoms + 1):
        res = {b: bench(n, b, args.repeat) for b in backends}
        times = " ".join(f"{1e3 * res[b][0]:14.2f}" for b in backends)
        line = f"{n:>2} {res[backends[0]][1]:>6} {times}"
        if len(backends) == 2:
            speedup = res["python"][0] / res["compiled"][0]
            diff = np.max(np.abs(res["python"][2] - res["compiled"][2]))
            line += f"   {speedup:7.1f}x  {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
