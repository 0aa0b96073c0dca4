"""Pure-Python (numpy) kernels.

Reference implementation of the hot loops. ``_kernels_fast.pyx`` mirrors
these functions one-to-one; both must produce the same iterates up to
floating-point summation order.

State conventions shared by every kernel:

* ``Xt`` is the (K, N) transposed spin matrix, float64, entries +-1.
* ``U[j, n] = x_jn * sum_k beta_jk x_kn`` (signed margin of node j).
* ``E[j, n] = exp(U[j, n])``, updated multiplicatively and rebuilt from
  ``U`` (clamped to +-690) when it leaves [1e-300, 1e300].
* ``R[j, n] = 1 - theta_jn = 1 / (1 + E[j, n])``.
"""

import numpy as np

E_HI = 1e300
E_LO = 1e-300
U_CLAMP = 690.0


def sigmoid_neg(u):
    """Return ``1 / (1 + exp(u))`` without overflow."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    pos = u >= 0
    e = np.exp(-u[pos])
    out[pos] = e / (1.0 + e)
    out[~pos] = 1.0 / (1.0 + np.exp(u[~pos]))
    return out


def exp_clamped(u):
    return np.exp(np.clip(u, -U_CLAMP, U_CLAMP))


def _refresh(U_row, E_row, f):
    E_row *= f
    bad = (E_row > E_HI) | (E_row < E_LO)
    if bad.any():
        E_row[bad] = exp_clamped(U_row[bad])


def _soft(r, t):
    if r > t:
        return r - t
    if r < -t:
        return r + t
    return 0.0


def _scad_deriv(t, lam, a):
    if t <= lam:
        return lam
    v = a * lam - t
    return v / (a - 1.0) if v > 0.0 else 0.0


def cma_sweep(Xt, U, E, R, beta, pj, pk, order, weights, lam, a, scad):
    """One cyclic pass of coordinate-minorization ascent over ``order``.

    With ``scad`` false the penalty weight of pair ``i`` is ``weights[i]``;
    with ``scad`` true it is the SCAD derivative at the current ``|beta[i]|``,
    refreshed on every visit. Updates ``U``, ``E``, ``R`` and ``beta`` in place and
    returns the largest absolute coefficient change.
    """
    N = Xt.shape[1]
    max_change = 0.0
    for idx in order:
        j = pj[idx]
        k = pk[idx]
        b = beta[idx]
        prod = Xt[j] * Xt[k]
        z = float(np.dot(prod, R[j] + R[k])) / N
        if scad:
            w = _scad_deriv(abs(b), lam, a)
        else:
            w = weights[idx]
        b_new = _soft(b + 2.0 * z, 2.0 * w)
        d = b_new - b
        if d != 0.0:
            ed = np.exp(d)
            f = np.where(prod > 0, ed, 1.0 / ed)
            s = d * prod
            U[j] += s
            U[k] += s
            _refresh(U[j], E[j], f)
            _refresh(U[k], E[k], f)
            R[j] = 1.0 / (1.0 + E[j])
            R[k] = 1.0 / (1.0 + E[k])
            beta[idx] = b_new
            if abs(d) > max_change:
                max_change = abs(d)
    return max_change


def node_sweep(Xt, j, u, e, r, b, order, lam, cap):
    """One pass of coordinate-minorization ascent for node ``j``'s
    L1-penalized conditional log-likelihood (curvature bound 1/4).

    ``u``, ``e`` and ``r`` are the margin, its exponential and the
    ``1 - theta`` row of node ``j``;
    ``b`` has length K and ``b[j]`` is ignored. Coefficients are clipped
    to ``[-cap, cap]``.
    """
    N = Xt.shape[1]
    xj = Xt[j]
    max_change = 0.0
    for k in order:
        bk = b[k]
        prod = xj * Xt[k]
        g = float(np.dot(prod, r)) / N
        b_new = _soft(bk + 4.0 * g, 4.0 * lam)
        if b_new > cap:
            b_new = cap
        elif b_new < -cap:
            b_new = -cap
        d = b_new - bk
        if d != 0.0:
            ed = np.exp(d)
            u += d * prod
            _refresh(u, e, np.where(prod > 0, ed, 1.0 / ed))
            r[:] = 1.0 / (1.0 + e)
            b[k] = b_new
            if abs(d) > max_change:
                max_change = abs(d)
    return max_change


def gibbs_sweeps(J, state, uniforms):
    """Run ``len(uniforms)`` single-site Gibbs sweeps.

    ``J`` is the symmetric (K, K) coupling matrix with zero diagonal. Node
    ``j`` is set to +1 when ``uniforms[t, j] < sigmoid(sum_k J_jk s_k)``.
    ``state`` is updated in place; the state after every sweep is returned
    as an (S, K) array.
    """
    S, K = uniforms.shape
    out = np.empty((S, K))
    for t in range(S):
        for j in range(K):
            m = float(np.dot(J[j], state))
            p_up = 1.0 - float(sigmoid_neg(np.array([m]))[0])
            state[j] = 1.0 if uniforms[t, j] < p_up else -1.0
        out[t] = state
    return out
