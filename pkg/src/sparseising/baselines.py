"""Neighborhood selection: per-node L1-penalized logistic regressions,
aggregated into a coupling estimate by intersection (NSAI) or union (NSAU).

Node ``j``'s model is the conditional law of ``X_j`` given the rest, so its
coefficient on node ``k`` estimates the same ``beta_jk`` as the composite
likelihood. Each node problem is solved by coordinate-minorization ascent
with curvature bound 1/4.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend
from ._kernels_py import exp_clamped
from .cma import DEFAULT_GRID_RATIO, DEFAULT_GRID_SIZE, SolverConfig, kkt_residual
from .model import check_spins

SEPARATION_CAP = 30.0


@dataclass
class NodeFit:
    coef: np.ndarray
    lam: float
    loglik: float
    kkt_residual: float
    sweeps: int
    converged: bool

    @property
    def df(self):
        return int(np.count_nonzero(self.coef))


@dataclass
class NeighborhoodFit:
    """``coefs[j, k]`` is node j's estimate of ``beta_jk``; the diagonal is 0."""

    coefs: np.ndarray
    lambdas: np.ndarray
    converged: np.ndarray
    separated: np.ndarray = None

    @property
    def K(self):
        return self.coefs.shape[0]


def _node_state(Xt, j, b):
    m = b @ Xt
    u = np.ascontiguousarray(Xt[j] * m)
    e = exp_clamped(u)
    return u, e, 1.0 / (1.0 + e)


def _node_loglik(u):
    return float(-np.logaddexp(0.0, -u).mean())


def fit_node_logistic(X, j, lam, init=None, cfg=None, support=None, cap=np.inf):
    """L1-penalized conditional log-likelihood of node ``j``.

    Maximizes ``(1/N) sum_n log theta_jn - lam * sum_k |b_k|`` over the
    coefficients in ``support`` (default: every ``k != j``); the rest stay 0.
    """
    cfg = cfg or SolverConfig()
    X = check_spins(X)
    N, K = X.shape
    if not 0 <= j < K:
        raise IndexError(f"node {j} out of range for K={K}")
    if not lam >= 0:
        raise ValueError("lambda must be nonnegative")
    kernels = _backend.get_kernels(cfg.backend)
    Xt = np.ascontiguousarray(X.T)
    b = np.zeros(K) if init is None else np.array(init, dtype=float)
    b[j] = 0.0
    if support is None:
        order = np.array([k for k in range(K) if k != j], dtype=np.int64)
    else:
        order = np.array(sorted(int(k) for k in support if k != j), dtype=np.int64)
        mask = np.zeros(K, dtype=bool)
        mask[order] = True
        b[~mask] = 0.0
    u, e, r = _node_state(Xt, j, b)

    sweeps = 0
    converged = order.size == 0
    while not converged and sweeps < cfg.max_sweeps:
        change = kernels.node_sweep(Xt, j, u, e, r, b, order, lam, cap)
        sweeps += 1
        if change < cfg.tol:
            converged = True
            break
        if not cfg.active_set:
            continue
        while sweeps < cfg.max_sweeps:
            active = order[b[order] != 0]
            if active.size == 0:
                break
            change = kernels.node_sweep(Xt, j, u, e, r, b, active, lam, cap)
            sweeps += 1
            if change < cfg.tol:
                break

    u, _, r = _node_state(Xt, j, b)
    grad = (Xt[order] * (Xt[j] * r)).sum(axis=1) / N
    return NodeFit(coef=b, lam=float(lam), loglik=_node_loglik(u),
                   kkt_residual=kkt_residual(b[order], grad, lam), sweeps=sweeps,
                   converged=converged)


def node_lambda_max(X, j):
    """Smallest lambda at which the zero vector solves node ``j``'s problem."""
    X = check_spins(X)
    c = X[:, j] @ X / X.shape[0]
    c[j] = 0.0
    return float(np.abs(c).max() / 2.0)


def _node_grid(lmax, n, ratio):
    if lmax == 0:
        return np.array([0.0])
    return np.geomspace(lmax, ratio * lmax, n)


def node_path(X, j, grid=None, cfg=None, n_lambda=DEFAULT_GRID_SIZE, ratio=DEFAULT_GRID_RATIO):
    """Warm-started path for node ``j`` with per-node BIC selection.

    Without an explicit ``grid`` the path runs from node ``j``'s own lambda
    max down by ``ratio`` over ``n_lambda`` geometric steps. Returns
    ``(fits, scores, chosen)``; ties go to the larger lambda.
    """
    cfg = cfg or SolverConfig()
    X = check_spins(X)
    N = X.shape[0]
    if grid is None:
        grid = _node_grid(node_lambda_max(X, j), n_lambda, ratio)
    fits = []
    start = None
    for lam in grid:
        fit = fit_node_logistic(X, j, lam, start, cfg)
        fits.append(fit)
        start = fit.coef
    scores = np.array([2 * N * f.loglik - np.log(N) * f.df for f in fits])
    return fits, scores, int(np.argmax(scores))


def _map(fn, items, threads):
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def neighborhood_select(X, cfg=None, tuning="node", grid=None, threads=1,
                        n_lambda=DEFAULT_GRID_SIZE, ratio=DEFAULT_GRID_RATIO):
    """Fit every node's penalized logistic regression and BIC-tune it.

    ``tuning="node"`` picks lambda per node; ``tuning="global"`` uses one
    shared grid and maximizes the summed node BIC scores.
    """
    X = check_spins(X)
    K = X.shape[1]
    if tuning == "node":
        results = _map(lambda j: node_path(X, j, grid, cfg, n_lambda, ratio), range(K),
                       threads)
        chosen = [fits[c] for fits, _, c in results]
    elif tuning == "global":
        if grid is None:
            grid = _node_grid(max(node_lambda_max(X, j) for j in range(K)), n_lambda, ratio)
        results = _map(lambda j: node_path(X, j, grid, cfg), range(K), threads)
        total = np.sum([scores for _, scores, _ in results], axis=0)
        c = int(np.argmax(total))
        chosen = [fits[c] for fits, _, _ in results]
    else:
        raise ValueError(f"unknown tuning mode {tuning!r}")
    return NeighborhoodFit(np.array([f.coef for f in chosen]),
                           np.array([f.lam for f in chosen]),
                           np.array([f.converged for f in chosen]))


def relaxed_refit(X, support, cfg=None, threads=1):
    """Unpenalized refit of each node on its selected predictors.

    ``support`` is a (K, K) boolean matrix or a :class:`NeighborhoodFit`
    (its nonzero pattern is used). Coefficients are capped at ``|b| <= 30``.
    Under separation they diverge only logarithmically in the sweep count,
    so a node is flagged as separated when it hits the cap or fails to
    converge.
    """
    X = check_spins(X)
    K = X.shape[1]
    if isinstance(support, NeighborhoodFit):
        support = support.coefs != 0
    support = np.asarray(support, dtype=bool)
    cfg = cfg or SolverConfig(tol=1e-9, max_sweeps=20000)

    def refit(j):
        return fit_node_logistic(X, j, 0.0, None, cfg, np.flatnonzero(support[j]),
                                 SEPARATION_CAP)

    fits = _map(refit, range(K), threads)
    coefs = np.array([f.coef for f in fits])
    converged = np.array([f.converged for f in fits])
    separated = ~converged | np.any(np.abs(coefs) >= SEPARATION_CAP, axis=1)
    return NeighborhoodFit(coefs, np.zeros(K), converged, separated)


def _directed(fits):
    B = fits.coefs if isinstance(fits, NeighborhoodFit) else np.asarray(fits, dtype=float)
    iu = np.triu_indices(B.shape[0], k=1)
    return B[iu], B.T[iu]


def aggregate_nsai(fits):
    """Intersection rule: average when both directions are nonzero, else 0."""
    a, b = _directed(fits)
    return np.where((a != 0) & (b != 0), (a + b) / 2.0, 0.0)


def aggregate_nsau(fits):
    """Union rule: average when both nonzero, the nonzero one when only one is."""
    a, b = _directed(fits)
    return np.where((a != 0) & (b != 0), (a + b) / 2.0, np.where(a != 0, a, b))
