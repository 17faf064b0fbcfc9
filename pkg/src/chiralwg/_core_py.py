"""Pure NumPy fallback for the Lindblad kernels in ``_core.pyx``.

Both backends implement the same Dormand-Prince 5(4) stepping with identical
step-size control, so they agree to rounding.
"""
import numpy as np

# Dormand-Prince tableau
A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# 5th-order weights minus embedded 4th-order weights
E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

OK = 0
STEP_UNDERFLOW = 1
MAX_STEPS = 2

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0

BACKEND = "python"


def lindblad_rhs(heff, lops, rho):
    """``-i (Heff rho - rho Heff^dag) + sum_k L_k rho L_k^dag``."""
    out = -1j * (heff @ rho) + 1j * (rho @ heff.conj().T)
    for L in lops:
        out += L @ rho @ L.conj().T
    return out


def _step_factor(err):
    if err == 0.0:
        return MAX_FACTOR
    return min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * err**-0.2))


def integrate(heff, lops, rho0, sample_times, rtol, atol, h_init, max_steps):
    """Integrate from t = 0 and return the states at `sample_times`.

    Returns ``(states, status, n_accepted, n_rejected, error_sum)`` where
    `error_sum` adds up the max-norm of the local error estimate over all
    accepted steps.
    """
    heff = np.ascontiguousarray(heff, dtype=complex)
    lops = np.ascontiguousarray(lops, dtype=complex)
    y = np.array(rho0, dtype=complex)
    n_samples = len(sample_times)
    d = y.shape[0]
    states = np.empty((n_samples, d, d), dtype=complex)

    t = 0.0
    h = h_init
    n_acc = n_rej = 0
    err_sum = 0.0
    k = [None] * 7
    k[0] = lindblad_rhs(heff, lops, y)

    for s in range(n_samples):
        t_target = sample_times[s]
        while t < t_target:
            if n_acc + n_rej >= max_steps:
                return states, MAX_STEPS, n_acc, n_rej, err_sum
            if h <= 1e-14 * max(1.0, abs(t)):
                return states, STEP_UNDERFLOW, n_acc, n_rej, err_sum
            h_step = h
            last = False
            if t + h_step >= t_target:
                h_step = t_target - t
                last = True
            for i in range(1, 7):
                ys = y.copy()
                for j, a in enumerate(A[i]):
                    if a != 0.0:
                        ys += (h_step * a) * k[j]
                k[i] = lindblad_rhs(heff, lops, ys)
            y_new = ys  # last stage is evaluated at the 5th-order solution
            err_vec = np.zeros_like(y)
            for j in range(7):
                if E[j] != 0.0:
                    err_vec += (h_step * E[j]) * k[j]
            abs_err = np.abs(err_vec)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = float(np.max(abs_err / scale))
            if err <= 1.0:
                t = t_target if last else t + h_step
                y = y_new
                k[0] = k[6]
                n_acc += 1
                err_sum += float(np.max(abs_err))
                h_new = h_step * _step_factor(err)
                h = max(h, h_new) if last else h_new
            else:
                n_rej += 1
                h = h_step * max(MIN_FACTOR, SAFETY * err**-0.2)
        states[s] = y
    return states, OK, n_acc, n_rej, err_sum
