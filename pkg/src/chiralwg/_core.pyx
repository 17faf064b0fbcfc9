# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Lindblad kernels: right-hand side and Dormand-Prince 5(4) stepping.

Mirrors ``_core_py`` step for step; the Python wrapper in ``dynamics`` picks
whichever backend imported.
"""
import numpy as np

from libc.math cimport fabs, pow, sqrt

ctypedef double complex cplx


cdef inline cplx conj(cplx z) noexcept nogil:
    return z.conjugate()


cdef inline double cabs(cplx z) noexcept nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)

BACKEND = "compiled"

cdef enum:
    C_OK = 0
    C_STEP_UNDERFLOW = 1
    C_MAX_STEPS = 2

OK = C_OK
STEP_UNDERFLOW = C_STEP_UNDERFLOW
MAX_STEPS = C_MAX_STEPS

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 5.0

cdef double[7][6] A_TAB
cdef double[7] E_TAB

A_TAB[1][0] = 1.0 / 5
A_TAB[2][0] = 3.0 / 40
A_TAB[2][1] = 9.0 / 40
A_TAB[3][0] = 44.0 / 45
A_TAB[3][1] = -56.0 / 15
A_TAB[3][2] = 32.0 / 9
A_TAB[4][0] = 19372.0 / 6561
A_TAB[4][1] = -25360.0 / 2187
A_TAB[4][2] = 64448.0 / 6561
A_TAB[4][3] = -212.0 / 729
A_TAB[5][0] = 9017.0 / 3168
A_TAB[5][1] = -355.0 / 33
A_TAB[5][2] = 46732.0 / 5247
A_TAB[5][3] = 49.0 / 176
A_TAB[5][4] = -5103.0 / 18656
A_TAB[6][0] = 35.0 / 384
A_TAB[6][1] = 0.0
A_TAB[6][2] = 500.0 / 1113
A_TAB[6][3] = 125.0 / 192
A_TAB[6][4] = -2187.0 / 6784
A_TAB[6][5] = 11.0 / 84

E_TAB[0] = 71.0 / 57600
E_TAB[1] = 0.0
E_TAB[2] = -71.0 / 16695
E_TAB[3] = 71.0 / 1920
E_TAB[4] = -17253.0 / 339200
E_TAB[5] = 22.0 / 525
E_TAB[6] = -1.0 / 40


cdef void _rhs(const cplx* heff, const cplx* lops, Py_ssize_t n_ops, Py_ssize_t d,
               const cplx* rho, cplx* out, cplx* tmp) noexcept nogil:
    # out = -i Heff rho + i rho Heff^dag + sum_k L_k rho L_k^dag
    # operators are sparse here, so loop over nonzero entries row by row
    cdef Py_ssize_t i, j, m, k, dd = d * d
    cdef cplx a
    cdef const cplx* L
    cdef cplx I = 1j
    for i in range(dd):
        out[i] = 0
    for i in range(d):
        for m in range(d):
            a = heff[i * d + m]
            if a.real == 0.0 and a.imag == 0.0:
                continue
            a = -I * a
            for j in range(d):
                out[i * d + j] = out[i * d + j] + a * rho[m * d + j]
    for j in range(d):
        for m in range(d):
            a = heff[j * d + m]
            if a.real == 0.0 and a.imag == 0.0:
                continue
            a = I * conj(a)
            for i in range(d):
                out[i * d + j] = out[i * d + j] + rho[i * d + m] * a
    for k in range(n_ops):
        L = lops + k * dd
        for i in range(dd):
            tmp[i] = 0
        # tmp = L rho
        for i in range(d):
            for m in range(d):
                a = L[i * d + m]
                if a.real == 0.0 and a.imag == 0.0:
                    continue
                for j in range(d):
                    tmp[i * d + j] = tmp[i * d + j] + a * rho[m * d + j]
        # out += tmp L^dag
        for j in range(d):
            for m in range(d):
                a = L[j * d + m]
                if a.real == 0.0 and a.imag == 0.0:
                    continue
                a = conj(a)
                for i in range(d):
                    out[i * d + j] = out[i * d + j] + tmp[i * d + m] * a


def lindblad_rhs(heff, lops, rho):
    cdef cplx[:, ::1] h = np.ascontiguousarray(heff, dtype=complex)
    cdef cplx[:, :, ::1] ls = np.ascontiguousarray(np.asarray(lops, dtype=complex).reshape(-1, h.shape[0], h.shape[0]))
    cdef cplx[:, ::1] r = np.ascontiguousarray(rho, dtype=complex)
    cdef Py_ssize_t d = h.shape[0]
    out = np.empty((d, d), dtype=complex)
    tmp = np.empty((d, d), dtype=complex)
    cdef cplx[:, ::1] o = out
    cdef cplx[:, ::1] t = tmp
    cdef const cplx* lp = &ls[0, 0, 0] if ls.shape[0] > 0 else NULL
    _rhs(&h[0, 0], lp, ls.shape[0], d, &r[0, 0], &o[0, 0], &t[0, 0])
    return out


cdef inline double _step_factor(double err) noexcept nogil:
    cdef double f
    if err == 0.0:
        return MAX_FACTOR
    f = SAFETY * pow(err, -0.2)
    if f < MIN_FACTOR:
        f = MIN_FACTOR
    if f > MAX_FACTOR:
        f = MAX_FACTOR
    return f


def integrate(heff, lops, rho0, sample_times, double rtol, double atol, double h_init, long max_steps):
    """Integrate from t = 0 and return the states at `sample_times`.

    Returns ``(states, status, n_accepted, n_rejected, error_sum)``.
    """
    cdef cplx[:, ::1] h_mv = np.ascontiguousarray(heff, dtype=complex)
    cdef Py_ssize_t d = h_mv.shape[0]
    cdef Py_ssize_t dd = d * d
    cdef cplx[:, :, ::1] l_mv = np.ascontiguousarray(np.asarray(lops, dtype=complex).reshape(-1, d, d))
    cdef Py_ssize_t n_ops = l_mv.shape[0]
    cdef double[::1] times = np.ascontiguousarray(sample_times, dtype=float)
    cdef Py_ssize_t n_samples = times.shape[0]
    states = np.empty((n_samples, d, d), dtype=complex)
    cdef cplx[:, :, ::1] st = states
    work_arr = np.empty((11, dd), dtype=complex)
    cdef cplx[:, ::1] work = work_arr
    y_arr = np.array(rho0, dtype=complex).reshape(dd)
    cdef cplx[::1] y0 = y_arr

    cdef cplx* y = &work[0, 0]
    cdef cplx* ys = &work[1, 0]
    cdef cplx* tmp = &work[2, 0]
    cdef cplx* kbuf[7]
    cdef cplx* ktmp
    cdef Py_ssize_t i, j, p, s
    for i in range(7):
        kbuf[i] = &work[3 + i, 0]
    cdef cplx* errv = &work[10, 0]
    cdef const cplx* hp = &h_mv[0, 0]
    cdef const cplx* lp = &l_mv[0, 0, 0] if n_ops > 0 else NULL

    cdef double t = 0.0, h = h_init, h_step, h_new, t_target, err, a, e, sc, ae, ay, ayn, emax
    cdef long n_acc = 0, n_rej = 0
    cdef double err_sum = 0.0
    cdef bint last
    cdef int status = C_OK

    for p in range(dd):
        y[p] = y0[p]

    with nogil:
        _rhs(hp, lp, n_ops, d, y, kbuf[0], tmp)
        for s in range(n_samples):
            t_target = times[s]
            while t < t_target:
                if n_acc + n_rej >= max_steps:
                    status = C_MAX_STEPS
                    break
                if h <= 1e-14 * (fabs(t) if fabs(t) > 1.0 else 1.0):
                    status = C_STEP_UNDERFLOW
                    break
                h_step = h
                last = False
                if t + h_step >= t_target:
                    h_step = t_target - t
                    last = True
                for i in range(1, 7):
                    for p in range(dd):
                        ys[p] = y[p]
                    for j in range(i):
                        a = A_TAB[i][j]
                        if a != 0.0:
                            for p in range(dd):
                                ys[p] = ys[p] + (h_step * a) * kbuf[j][p]
                    _rhs(hp, lp, n_ops, d, ys, kbuf[i], tmp)
                for p in range(dd):
                    errv[p] = 0
                for j in range(7):
                    e = E_TAB[j]
                    if e != 0.0:
                        for p in range(dd):
                            errv[p] = errv[p] + (h_step * e) * kbuf[j][p]
                err = 0.0
                emax = 0.0
                for p in range(dd):
                    ae = cabs(errv[p])
                    ay = cabs(y[p])
                    ayn = cabs(ys[p])
                    sc = atol + rtol * (ay if ay > ayn else ayn)
                    if ae / sc > err:
                        err = ae / sc
                    if ae > emax:
                        emax = ae
                if err <= 1.0:
                    if last:
                        t = t_target
                    else:
                        t = t + h_step
                    for p in range(dd):
                        y[p] = ys[p]
                    ktmp = kbuf[0]
                    kbuf[0] = kbuf[6]
                    kbuf[6] = ktmp
                    n_acc += 1
                    err_sum += emax
                    h_new = h_step * _step_factor(err)
                    if last:
                        if h_new > h:
                            h = h_new
                    else:
                        h = h_new
                else:
                    n_rej += 1
                    a = SAFETY * pow(err, -0.2)
                    if a < MIN_FACTOR:
                        a = MIN_FACTOR
                    h = h_step * a
            if status != C_OK:
                break
            for p in range(dd):
                st[s, p // d, p % d] = y[p]
    return states, status, n_acc, n_rej, err_sum
