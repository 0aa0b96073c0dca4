"""Coordinate-minorization ascent (CMA) for penalized composite likelihood.

Each coordinate update maximizes a quadratic lower bound of the composite
log-likelihood (curvature bounded by -1/2) minus a linearized penalty::

    beta_jk <- S(beta_jk + 2 z_jk, 2 w_jk),    S(r, t) = sgn(r) (|r| - t)_+

where ``z_jk`` is the gradient at the current iterate. Because the bound
minorizes the objective, every single update is an ascent step.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _backend
from ._kernels_py import exp_clamped, sigmoid_neg
from .model import (_grad_from_residuals, check_spins, composite_loglik, n_pairs,
                    pair_arrays, signed_margins)
from .penalty import LASSO, SCAD, Penalty, penalty_deriv

DEFAULT_GRID_SIZE = 100
DEFAULT_GRID_RATIO = 0.01


@dataclass
class SolverConfig:
    tol: float = 1e-6
    max_sweeps: int = 1000
    active_set: bool = True
    warm_start: bool = True
    backend: Optional[str] = None

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")


@dataclass
class FitResult:
    beta: np.ndarray
    lam: float
    objective: float
    loglik: float
    sweeps: int
    kkt_residual: float
    converged: bool
    penalty: str = LASSO
    lla_iters: int = 0
    history: list = field(default_factory=list)

    @property
    def df(self):
        return int(np.count_nonzero(self.beta))


@dataclass
class SolutionPath:
    lambdas: np.ndarray
    fits: list = field(default_factory=list)

    def __len__(self):
        return len(self.fits)

    def coefs(self):
        """(n_lambdas, n_pairs) array of estimates."""
        return np.array([f.beta for f in self.fits])


def cma_update(beta_jk, z_jk, w):
    """Maximizer of ``z (b - beta) - (b - beta)^2 / 4 - w |b|``."""
    if w < 0:
        raise ValueError("penalty weight must be nonnegative")
    r = beta_jk + 2.0 * z_jk
    return float(np.sign(r) * max(abs(r) - 2.0 * w, 0.0))


class CoordinateState:
    """Iterate plus cached margins, updated incrementally by the kernels."""

    def __init__(self, X, beta0=None, backend=None):
        X = check_spins(X)
        self.N, self.K = X.shape
        self.kernels = _backend.get_kernels(backend)
        self.Xt = np.ascontiguousarray(X.T)
        p = n_pairs(self.K)
        self.beta = np.zeros(p) if beta0 is None else np.array(beta0, dtype=float)
        if self.beta.shape != (p,):
            raise ValueError(f"initial value must have {p} entries")
        self.pj, self.pk = pair_arrays(self.K)
        self.all_pairs = np.arange(p, dtype=np.int64)
        self.U = np.ascontiguousarray(signed_margins(self.beta, X).T)
        self.E = exp_clamped(self.U)
        self.R = 1.0 / (1.0 + self.E)

    def sweep(self, order, weights, lam=0.0, a=3.7, scad=False, callback=None):
        if callback is None:
            return self.kernels.cma_sweep(self.Xt, self.U, self.E, self.R, self.beta, self.pj,
                                          self.pk, order, weights, lam, a, scad)
        change = 0.0
        for idx in order:
            one = np.array([idx], dtype=np.int64)
            d = self.kernels.cma_sweep(self.Xt, self.U, self.E, self.R, self.beta, self.pj,
                                       self.pk, one, weights, lam, a, scad)
            change = max(change, d)
            callback(int(idx), self.beta)
        return change


def _cycle(state, cfg, weights, lam=0.0, a=3.7, scad=False, callback=None):
    """Full sweeps alternating with active-set sweeps until a full sweep
    moves no coordinate by ``tol`` or more."""
    sweeps = 0
    converged = False
    while sweeps < cfg.max_sweeps:
        change = state.sweep(state.all_pairs, weights, lam, a, scad, callback)
        sweeps += 1
        if change < cfg.tol:
            converged = True
            break
        if not cfg.active_set:
            continue
        while sweeps < cfg.max_sweeps:
            active = np.flatnonzero(state.beta).astype(np.int64)
            if active.size == 0:
                break
            change = state.sweep(active, weights, lam, a, scad, callback)
            sweeps += 1
            if change < cfg.tol:
                break
    return sweeps, converged


def kkt_residual(beta, grad, weights):
    """Largest violation of the weighted-L1 stationarity conditions."""
    beta = np.asarray(beta)
    if beta.size == 0:
        return 0.0
    nz = beta != 0
    res = np.where(nz, np.abs(grad - weights * np.sign(beta)),
                   np.maximum(np.abs(grad) - weights, 0.0))
    return float(res.max())


def _finish(state, X, sweeps, converged, lam, pen_total, weights, kind):
    beta = state.beta.copy()
    X = np.asarray(X, dtype=float)
    U = signed_margins(beta, X)
    grad = _grad_from_residuals(X, sigmoid_neg(U))
    loglik = composite_loglik(beta, X)
    return FitResult(beta=beta, lam=float(lam), objective=loglik - pen_total,
                     loglik=loglik, sweeps=sweeps,
                     kkt_residual=kkt_residual(beta, grad, weights),
                     converged=converged, penalty=kind)


def fit_weighted_lasso(X, weights, init=None, cfg=None, lam=np.nan, callback=None):
    """Maximize ``l_c(beta) - sum_jk w_jk |beta_jk|`` by cyclic CMA.

    ``callback(idx, beta)`` is invoked after every single coordinate update
    when given (slow; meant for diagnostics).
    """
    cfg = cfg or SolverConfig()
    weights = np.ascontiguousarray(weights, dtype=float)
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ValueError("weights must be finite and nonnegative")
    state = CoordinateState(X, init, cfg.backend)
    if weights.shape != state.beta.shape:
        raise ValueError("one weight per pair is required")
    sweeps, converged = _cycle(state, cfg, weights, callback=callback)
    pen = float(np.sum(weights * np.abs(state.beta)))
    return _finish(state, X, sweeps, converged, lam, pen, weights, "weighted-lasso")


def fit_lasso(X, lam, init=None, cfg=None, callback=None):
    if not lam >= 0:
        raise ValueError("lambda must be nonnegative")
    p = n_pairs(np.shape(X)[1])
    fit = fit_weighted_lasso(X, np.full(p, float(lam)), init, cfg, lam, callback)
    fit.penalty = LASSO
    return fit


def fit_scad_cma(X, lam, a=3.7, init=None, cfg=None, callback=None):
    """Algorithm-1 CMA with the SCAD penalty.

    The weight of each coordinate is refreshed to ``P'(|beta_jk|)`` at every
    visit, so the linearization point moves with the iterate.
    """
    cfg = cfg or SolverConfig()
    pen = Penalty(SCAD, lam, a)
    state = CoordinateState(X, init, cfg.backend)
    dummy = np.zeros_like(state.beta)
    sweeps, converged = _cycle(state, cfg, dummy, lam, a, True, callback)
    weights = penalty_deriv(pen, np.abs(state.beta))
    return _finish(state, X, sweeps, converged, lam, pen.total(state.beta), weights, SCAD)


def lambda_max(X):
    """Smallest lambda at which the zero vector is a LASSO fixed point."""
    X = check_spins(X)
    C = X.T @ X / X.shape[0]
    return float(np.abs(C[np.triu_indices(X.shape[1], k=1)]).max())


def lambda_grid(lmax, n=DEFAULT_GRID_SIZE, ratio=DEFAULT_GRID_RATIO):
    if not lmax > 0:
        raise ValueError("lambda_max must be positive (data has no pairwise correlation)")
    return np.geomspace(lmax, ratio * lmax, n)


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("lambda grid must be a nonempty 1-D sequence")
    if np.any(grid <= 0) or np.any(np.diff(grid) >= 0):
        raise ValueError("lambda grid must be positive and strictly decreasing")
    return grid


def fit_path(X, kind=LASSO, grid=None, cfg=None, init=None, a=3.7):
    """Fit along a decreasing lambda grid.

    With ``cfg.warm_start`` each fit starts at the previous solution; the
    first fit (and every fit when warm starts are off) starts at ``init``,
    default zero.
    """
    cfg = cfg or SolverConfig()
    X = check_spins(X)
    grid = lambda_grid(lambda_max(X)) if grid is None else _check_grid(grid)
    fits = []
    start = init
    for lam in grid:
        if kind == LASSO:
            fit = fit_lasso(X, lam, start, cfg)
        elif kind == SCAD:
            fit = fit_scad_cma(X, lam, a, start, cfg)
        else:
            raise ValueError(f"unknown penalty kind {kind!r}")
        fits.append(fit)
        if cfg.warm_start:
            start = fit.beta
    return SolutionPath(grid, fits)
