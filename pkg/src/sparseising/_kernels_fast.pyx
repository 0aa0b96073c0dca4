# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same contracts as ``_kernels_py``."""

from libc.math cimport exp, fabs

# exp(U) is kept multiplicatively; outside this range it is rebuilt from U
DEF E_HI = 1e300
DEF E_LO = 1e-300
DEF U_CLAMP = 690.0


cdef inline double _sigmoid_neg(double u) noexcept nogil:
    cdef double e
    if u >= 0:
        e = exp(-u)
        return e / (1.0 + e)
    return 1.0 / (1.0 + exp(u))


cdef inline double _exp_clamped(double u) noexcept nogil:
    if u > U_CLAMP:
        u = U_CLAMP
    elif u < -U_CLAMP:
        u = -U_CLAMP
    return exp(u)


cdef inline double _soft(double r, double t) noexcept nogil:
    if r > t:
        return r - t
    if r < -t:
        return r + t
    return 0.0


cdef inline double _scad_deriv(double t, double lam, double a) noexcept nogil:
    cdef double v
    if t <= lam:
        return lam
    v = a * lam - t
    if v > 0.0:
        return v / (a - 1.0)
    return 0.0


cdef inline double _dot3(const double* x, const double* y, const double* w,
                         Py_ssize_t N) noexcept nogil:
    # sum_n x[n] y[n] w[n] with four partial sums so the loop pipelines
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef Py_ssize_t n = 0
    while n + 4 <= N:
        s0 += x[n] * y[n] * w[n]
        s1 += x[n + 1] * y[n + 1] * w[n + 1]
        s2 += x[n + 2] * y[n + 2] * w[n + 2]
        s3 += x[n + 3] * y[n + 3] * w[n + 3]
        n += 4
    while n < N:
        s0 += x[n] * y[n] * w[n]
        n += 1
    return (s0 + s1) + (s2 + s3)


cdef inline void _move(const double* xj, const double* xk, double* u, double* e,
                       double* r, double d, double ed, double edi,
                       Py_ssize_t N) noexcept nogil:
    # shift one margin row by d * x_j * x_k and keep exp(u) and 1/(1+exp(u)) in step
    cdef Py_ssize_t n
    cdef double pr, v
    cdef int bad = 0
    for n in range(N):
        pr = xj[n] * xk[n]
        u[n] += d * pr
        v = e[n] * (ed if pr > 0 else edi)
        e[n] = v
        bad |= (v > E_HI) | (v < E_LO)
    if bad:
        for n in range(N):
            if e[n] > E_HI or e[n] < E_LO:
                e[n] = _exp_clamped(u[n])
    for n in range(N):
        r[n] = 1.0 / (1.0 + e[n])


def cma_sweep(const double[:, ::1] Xt, double[:, ::1] U, double[:, ::1] E,
              double[:, ::1] R, double[::1] beta, const long[::1] pj, const long[::1] pk,
              const long[::1] order, const double[::1] weights,
              double lam, double a, bint scad):
    cdef Py_ssize_t N = Xt.shape[1]
    cdef Py_ssize_t m = order.shape[0]
    cdef Py_ssize_t t, n, idx, j, k
    cdef double b, z, w, b_new, d, ed, edi, max_change = 0.0
    cdef const double* xj
    cdef const double* xk
    cdef double* rj
    cdef double* rk
    with nogil:
        for t in range(m):
            idx = order[t]
            j = pj[idx]
            k = pk[idx]
            xj = &Xt[j, 0]
            xk = &Xt[k, 0]
            rj = &R[j, 0]
            rk = &R[k, 0]
            b = beta[idx]
            z = (_dot3(xj, xk, rj, N) + _dot3(xj, xk, rk, N)) / N
            if scad:
                w = _scad_deriv(fabs(b), lam, a)
            else:
                w = weights[idx]
            b_new = _soft(b + 2.0 * z, 2.0 * w)
            d = b_new - b
            if d != 0.0:
                ed = exp(d)
                edi = 1.0 / ed
                _move(xj, xk, &U[j, 0], &E[j, 0], rj, d, ed, edi, N)
                _move(xj, xk, &U[k, 0], &E[k, 0], rk, d, ed, edi, N)
                beta[idx] = b_new
                if fabs(d) > max_change:
                    max_change = fabs(d)
    return max_change


def node_sweep(const double[:, ::1] Xt, Py_ssize_t j, double[::1] u,
               double[::1] e, double[::1] r, double[::1] b, const long[::1] order,
               double lam, double cap):
    cdef Py_ssize_t N = Xt.shape[1]
    cdef Py_ssize_t m = order.shape[0]
    cdef Py_ssize_t t, n, k
    cdef double bk, g, b_new, d, ed, edi, max_change = 0.0
    with nogil:
        for t in range(m):
            k = order[t]
            bk = b[k]
            g = _dot3(&Xt[j, 0], &Xt[k, 0], &r[0], N) / N
            b_new = _soft(bk + 4.0 * g, 4.0 * lam)
            if b_new > cap:
                b_new = cap
            elif b_new < -cap:
                b_new = -cap
            d = b_new - bk
            if d != 0.0:
                ed = exp(d)
                edi = 1.0 / ed
                _move(&Xt[j, 0], &Xt[k, 0], &u[0], &e[0], &r[0], d, ed, edi, N)
                b[k] = b_new
                if fabs(d) > max_change:
                    max_change = fabs(d)
    return max_change


def gibbs_sweeps(const double[:, ::1] J, double[::1] state,
                 const double[:, ::1] uniforms):
    import numpy as np
    cdef Py_ssize_t S = uniforms.shape[0]
    cdef Py_ssize_t K = uniforms.shape[1]
    out_arr = np.empty((S, K))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t t, j, i
    cdef double m, p_up
    with nogil:
        for t in range(S):
            for j in range(K):
                m = 0.0
                for i in range(K):
                    m += J[j, i] * state[i]
                p_up = 1.0 - _sigmoid_neg(m)
                if uniforms[t, j] < p_up:
                    state[j] = 1.0
                else:
                    state[j] = -1.0
            for j in range(K):
                out[t, j] = state[j]
    return out_arr
