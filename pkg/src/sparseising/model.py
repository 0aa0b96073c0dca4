"""Ising model representation and the composite conditional likelihood.

Couplings are stored as the flattened upper triangle of the symmetric
coupling matrix, pairs ``(j, k)`` with ``j < k`` in lexicographic order.
All indices in the Python API are 0-based; the file formats in
:mod:`sparseising.io` are 1-based.

The conditional probability of node ``j`` in observation ``n`` is::

    theta_jn = sigmoid(x_jn * sum_{k != j} beta_jk x_kn)

and the joint law whose conditionals reproduce it is::

    P(x) = exp(sum_{j<k} beta_jk x_j x_k / 2) / Z(beta)
"""

from dataclasses import dataclass

import numpy as np

from ._kernels_py import sigmoid_neg

MAX_EXACT_K = 20


def n_pairs(K):
    return K * (K - 1) // 2


def pair_index(j, k, K):
    """Flat index of the unordered pair ``{j, k}`` (0-based, ``j != k``)."""
    if j == k:
        raise ValueError("diagonal couplings are not stored")
    if j > k:
        j, k = k, j
    if j < 0 or k >= K:
        raise IndexError(f"pair ({j}, {k}) out of range for K={K}")
    return j * K - j * (j + 1) // 2 + (k - j - 1)


def pair_arrays(K):
    """Return ``(pj, pk)``, the row and column of every stored pair."""
    pj, pk = np.triu_indices(K, k=1)
    return pj.astype(np.int64), pk.astype(np.int64)


def K_from_pairs(p):
    K = int(round((1 + np.sqrt(1 + 8 * p)) / 2))
    if n_pairs(K) != p:
        raise ValueError(f"{p} is not a triangular number of pairs")
    return K


@dataclass(frozen=True)
class CouplingVector:
    """Symmetric, zero-diagonal couplings stored as the upper triangle."""

    K: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if self.K < 2:
            raise ValueError("need at least two nodes")
        if values.shape != (n_pairs(self.K),):
            raise ValueError(
                f"expected {n_pairs(self.K)} couplings for K={self.K}, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("couplings must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, K):
        return cls(K, np.zeros(n_pairs(K)))

    @classmethod
    def from_matrix(cls, M):
        M = np.asarray(M, dtype=float)
        K = M.shape[0]
        if M.shape != (K, K) or not np.allclose(M, M.T):
            raise ValueError("coupling matrix must be square and symmetric")
        return cls(K, M[np.triu_indices(K, k=1)])

    def get(self, j, k):
        if j == k:
            return 0.0
        return float(self.values[pair_index(j, k, self.K)])

    def matrix(self):
        return coupling_matrix(self.values, self.K)

    def support(self):
        return np.flatnonzero(self.values)


def as_values(beta):
    """Coupling values as a float array, from a CouplingVector or array."""
    return np.asarray(getattr(beta, "values", beta), dtype=float)


def coupling_matrix(values, K=None):
    values = as_values(values)
    if K is None:
        K = K_from_pairs(values.size)
    M = np.zeros((K, K))
    iu = np.triu_indices(K, k=1)
    M[iu] = values
    M[(iu[1], iu[0])] = values
    return M


def check_spins(X):
    """Validate an (N, K) matrix of +-1 spins and return it as float64."""
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError("spin data must be a 2-D (N, K) array")
    N, K = X.shape
    if N < 1 or K < 2:
        raise ValueError(f"need N >= 1 and K >= 2, got N={N}, K={K}")
    if not np.all((X == 1) | (X == -1)):
        raise ValueError("spin entries must be -1 or +1")
    return X.astype(float)


def _prepare(beta, X):
    X = check_spins(X)
    values = as_values(beta)
    K = X.shape[1]
    if values.shape != (n_pairs(K),):
        raise ValueError(
            f"coupling vector has {values.size} entries, data has K={K} "
            f"(expected {n_pairs(K)})")
    return values, X


def signed_margins(beta, X):
    """``U[n, j] = x_jn * sum_k beta_jk x_kn``, shape (N, K)."""
    values, X = _prepare(beta, X)
    M = coupling_matrix(values, X.shape[1])
    return X * (X @ M)


def conditional_probs(beta, X):
    """theta_jn = P(X_j = x_jn | rest), shape (N, K)."""
    U = signed_margins(beta, X)
    return 1.0 - sigmoid_neg(U)


def composite_loglik(beta, X):
    """sum_j (1/N) sum_n log theta_jn."""
    U = signed_margins(beta, X)
    logtheta = -np.logaddexp(0.0, -U)
    value = float(logtheta.sum(axis=0).sum() / U.shape[0])
    if not np.isfinite(value):
        raise FloatingPointError("composite log-likelihood is not finite")
    return value


def _grad_from_residuals(X, R):
    # A[j, k] = (1/N) sum_n x_jn r_jn x_kn ; grad_jk = A[j, k] + A[k, j]
    N, K = X.shape
    A = (X * R).T @ X / N
    G = A + A.T
    return G[np.triu_indices(K, k=1)]


def composite_grad(beta, X):
    """Gradient of the composite log-likelihood over stored pairs.

    Component ``(j, k)`` is ``(1/N) sum_n x_jn x_kn (2 - theta_jn - theta_kn)``.
    """
    U = signed_margins(beta, X)
    return _grad_from_residuals(np.asarray(X, dtype=float), sigmoid_neg(U))


def coordinate_curvature(beta, X, j, k):
    """Second derivative of the composite log-likelihood in ``beta_jk``.

    Always lies in [-1/2, 0).
    """
    theta = conditional_probs(beta, X)
    if j == k:
        raise ValueError("diagonal couplings are not stored")
    v = theta[:, j] * (1 - theta[:, j]) + theta[:, k] * (1 - theta[:, k])
    return -float(v.mean())


def node_score_hessian(beta, X, j):
    """Score and Hessian of node ``j``'s negative conditional log-likelihood.

    Returns ``(psi, H)`` indexed by ``k != j`` in ascending order::

        psi_k      = (1/N) sum_n x_jn x_kn (theta_jn - 1)
        H[k1, k2]  = (1/N) sum_n x_k1n x_k2n theta_jn (1 - theta_jn)
    """
    theta = conditional_probs(beta, X)
    X = np.asarray(X, dtype=float)
    N, K = X.shape
    if not 0 <= j < K:
        raise IndexError(f"node {j} out of range for K={K}")
    others = np.array([k for k in range(K) if k != j])
    Xo = X[:, others]
    tj = theta[:, j]
    psi = (X[:, [j]] * Xo * (tj - 1.0)[:, None]).mean(axis=0)
    H = (Xo * (tj * (1 - tj))[:, None]).T @ Xo / N
    return psi, H


@dataclass(frozen=True)
class ExactDistribution:
    """Joint law over all 2^K spin configurations.

    ``states[c]`` is configuration ``c``; state bit ``j`` set means ``x_j = -1``,
    so ``states[0]`` is all +1.
    """

    K: int
    states: np.ndarray
    probs: np.ndarray
    log_partition: float

    def conditional(self, j, x):
        """P(X_j = x_j | X_(-j) = x_(-j)) for a full configuration ``x``."""
        x = np.asarray(x, dtype=float)
        flipped = x.copy()
        flipped[j] = -flipped[j]
        p_x = self.probs[state_index(x)]
        p_f = self.probs[state_index(flipped)]
        return p_x / (p_x + p_f)


def all_states(K):
    codes = np.arange(2 ** K, dtype=np.int64)[:, None]
    bits = (codes >> np.arange(K - 1, -1, -1)) & 1
    return 1.0 - 2.0 * bits


def state_index(x):
    """Row of ``x`` in :func:`all_states` ordering."""
    bits = (np.asarray(x) < 0).astype(np.int64)
    K = bits.shape[-1]
    weights = 1 << np.arange(K - 1, -1, -1)
    return bits @ weights


def exact_distribution(beta, K=None):
    """Enumerate the joint law, with the partition function computed explicitly."""
    values = as_values(beta)
    if K is None:
        K = getattr(beta, "K", None) or K_from_pairs(values.size)
    if K > MAX_EXACT_K:
        raise ValueError(f"exact enumeration supports K <= {MAX_EXACT_K}, got {K}")
    S = all_states(K)
    M = coupling_matrix(values, K)
    energy = 0.25 * np.einsum("ci,ij,cj->c", S, M, S)
    shift = energy.max()
    w = np.exp(energy - shift)
    Z = w.sum()
    return ExactDistribution(K, S, w / Z, float(np.log(Z) + shift))
