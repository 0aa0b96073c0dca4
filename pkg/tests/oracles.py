"""Reference computations written independently of the package internals.

Everything here uses plain loops or dense linear algebra so that agreement
with the package is evidence of correctness rather than shared code.
"""

import itertools
import math

import numpy as np


def pairs(K):
    return [(j, k) for j in range(K) for k in range(j + 1, K)]


def to_matrix(values, K):
    M = np.zeros((K, K))
    for v, (j, k) in zip(values, pairs(K)):
        M[j, k] = M[k, j] = v
    return M


def joint_weight(M, x):
    """Unnormalized Ising probability exp(sum_{j<k} beta_jk x_j x_k / 2)."""
    K = len(x)
    s = 0.0
    for j in range(K):
        for k in range(j + 1, K):
            s += M[j, k] * x[j] * x[k]
    return math.exp(s / 2.0)


def enum_distribution(values, K):
    M = to_matrix(values, K)
    states = list(itertools.product((1, -1), repeat=K))
    w = np.array([joint_weight(M, x) for x in states])
    return states, w / w.sum()


def enum_conditional(values, K, x, j):
    """P(X_j = x_j | X_-j = x_-j) by ratio of joint weights."""
    M = to_matrix(values, K)
    x = list(x)
    flipped = list(x)
    flipped[j] = -x[j]
    a = joint_weight(M, x)
    b = joint_weight(M, flipped)
    return a / (a + b)


def loglik_loops(values, X):
    """Composite log-likelihood with explicit loops."""
    X = np.asarray(X, dtype=float)
    N, K = X.shape
    M = to_matrix(values, K)
    total = 0.0
    for n in range(N):
        for j in range(K):
            m = sum(M[j, k] * X[n, k] for k in range(K) if k != j)
            total += -math.log1p(math.exp(-X[n, j] * m))
    return total / N


def central_diff(f, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def bisect(g, lo, hi, tol=1e-12, iters=200):
    glo = g(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def _design(X, support, K):
    """For each node i, the (N, |support|) derivative of u_i = x_i m_i."""
    X = np.asarray(X, dtype=float)
    all_pairs = pairs(K)
    D = [np.zeros((X.shape[0], len(support))) for _ in range(K)]
    for c, a in enumerate(support):
        j, k = all_pairs[a]
        D[j][:, c] = X[:, j] * X[:, k]
        D[k][:, c] = X[:, j] * X[:, k]
    return D


def restricted_newton(X, support, K, tol=1e-12, max_iter=100):
    """Maximize the composite log-likelihood over pairs in ``support``
    (indices into the lexicographic pair list) with damped Newton steps."""
    support = list(support)
    X = np.asarray(X, dtype=float)
    N = X.shape[0]
    D = _design(X, support, K)
    b = np.zeros(len(support))

    def parts(b):
        ll = 0.0
        g = np.zeros(len(support))
        H = np.zeros((len(support), len(support)))
        for i in range(K):
            u = D[i] @ b
            ll += -np.logaddexp(0.0, -u).sum()
            theta = 1.0 / (1.0 + np.exp(-u))
            g += D[i].T @ (1.0 - theta)
            H -= (D[i] * (theta * (1.0 - theta))[:, None]).T @ D[i]
        return ll / N, g / N, H / N

    for _ in range(max_iter):
        ll, g, H = parts(b)
        if np.max(np.abs(g), initial=0.0) < tol:
            break
        step = np.linalg.solve(H, -g)
        t = 1.0
        while t > 1e-12:
            cand = b + t * step
            if parts(cand)[0] >= ll - 1e-15:
                break
            t /= 2
        b = cand
    full = np.zeros(K * (K - 1) // 2)
    full[support] = b
    return full


def soft_threshold(r, t):
    return math.copysign(max(abs(r) - t, 0.0), r)


def scad_deriv(t, lam, a=3.7):
    if t <= lam:
        return lam
    return max(a * lam - t, 0.0) / (a - 1)


def random_spins(rng, N, K):
    return rng.choice(np.array([-1, 1], dtype=np.int8), size=(N, K))
