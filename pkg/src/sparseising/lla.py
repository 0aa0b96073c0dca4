"""Local linear approximation (LLA) with CMA inner solves, and the SCAD
pipelines built on it.

SCAD1
    CMA with per-visit SCAD weights, started from the BIC-tuned LASSO.
SCAD2
    Two one-step LLA passes over the grid, each BIC-tuned: the first
    linearizes at the tuned LASSO, the second at the tuned first pass.
SCAD2**
    LLA iterated to convergence from SCAD2 at SCAD2's lambda.
"""

from dataclasses import dataclass, field

import numpy as np

from .cma import (FitResult, SolutionPath, SolverConfig, _check_grid, fit_path,
                  fit_weighted_lasso, kkt_residual, lambda_grid, lambda_max)
from .model import check_spins, composite_grad, composite_loglik
from .penalty import LASSO, SCAD, Penalty, penalty_deriv
from .selection import BicReport, bic_select

SCAD1 = "SCAD1"
SCAD2 = "SCAD2"
SCAD2SS = "SCAD2starstar"


@dataclass
class LlaConfig:
    max_lla_iters: int = 10
    inner: SolverConfig = field(default_factory=SolverConfig)
    stop_tol: float = 1e-6
    a: float = 3.7
    bic_scale: str = "total"

    def __post_init__(self):
        if self.max_lla_iters < 1:
            raise ValueError("max_lla_iters must be at least 1")


@dataclass
class LassoStage:
    path: SolutionPath
    bic: BicReport

    @property
    def fit(self):
        return self.path.fits[self.bic.chosen]


@dataclass
class ScadPipelineResult:
    variant: str
    fit: FitResult
    chosen_lambda: float
    lla_iters_used: int
    provenance: dict = field(default_factory=dict)


def lla_weights(beta, lam, a=3.7):
    return np.ascontiguousarray(penalty_deriv(Penalty(SCAD, lam, a), np.abs(beta)))


def scad_objective(beta, X, lam, a=3.7):
    return composite_loglik(beta, X) - Penalty(SCAD, lam, a).total(beta)


def as_scad_fit(fit, X, lam, a=3.7):
    """Re-express a fit's diagnostics against the SCAD objective at ``lam``."""
    X = check_spins(X)
    beta = fit.beta
    grad = composite_grad(beta, X)
    return FitResult(beta=beta, lam=float(lam), objective=scad_objective(beta, X, lam, a),
                     loglik=composite_loglik(beta, X), sweeps=fit.sweeps,
                     kkt_residual=kkt_residual(beta, grad, lla_weights(beta, lam, a)),
                     converged=fit.converged, penalty=SCAD, lla_iters=fit.lla_iters,
                     history=list(fit.history))


def lla_cma(X, lam, init, cfg=None, callback=None):
    """Iterated weighted-LASSO solves with weights ``P'_lambda(|beta^(m)|)``.

    Stops when an iteration moves no coordinate by ``stop_tol`` or more (the
    previous iterate is then returned unchanged, so a fixed point maps to
    itself exactly) or when the weights repeat (the next subproblem would be
    identical). The returned fit reports the SCAD-penalized objective;
    ``history`` holds the SCAD objective at the start and after every LLA
    iteration. ``callback(idx, beta, weights)`` sees every coordinate update
    together with the frozen weights of the current iteration.
    """
    cfg = cfg or LlaConfig()
    X = check_spins(X)
    if not lam >= 0:
        raise ValueError("lambda must be nonnegative")
    beta = np.array(init, dtype=float)
    weights = lla_weights(beta, lam, cfg.a)
    history = [scad_objective(beta, X, lam, cfg.a)]

    def inner_cb(idx, b):
        callback(idx, b, weights)

    sweeps = 0
    converged = True
    iters = 0
    fit = None
    for _ in range(cfg.max_lla_iters):
        fit = fit_weighted_lasso(X, weights, beta, cfg.inner, lam,
                                 inner_cb if callback else None)
        iters += 1
        sweeps += fit.sweeps
        converged = converged and fit.converged
        change = float(np.max(np.abs(fit.beta - beta), initial=0.0))
        if change < cfg.stop_tol:
            fit.beta = beta
            history.append(history[-1])
            break
        beta = fit.beta
        history.append(scad_objective(beta, X, lam, cfg.a))
        new_weights = lla_weights(beta, lam, cfg.a)
        if np.array_equal(new_weights, weights):
            break
        weights = new_weights
    fit.sweeps = sweeps
    fit.converged = converged
    fit.lla_iters = iters
    fit.history = history
    return as_scad_fit(fit, X, lam, cfg.a)


def lasso_stage(X, grid=None, cfg=None):
    cfg = cfg or LlaConfig()
    path = fit_path(X, LASSO, grid, cfg.inner)
    return LassoStage(path, bic_select(path, X, cfg.bic_scale))


def _grid(X, grid):
    return lambda_grid(lambda_max(X)) if grid is None else _check_grid(grid)


def scad_path(X, grid, cfg, lasso):
    """SCAD fits along ``grid``, each started from the tuned LASSO fit."""
    cold = SolverConfig(cfg.inner.tol, cfg.inner.max_sweeps, cfg.inner.active_set,
                        warm_start=False, backend=cfg.inner.backend)
    return fit_path(X, SCAD, grid, cold, init=lasso.fit.beta, a=cfg.a)


def scad1(X, grid=None, cfg=None, lasso=None):
    cfg = cfg or LlaConfig()
    X = check_spins(X)
    grid = _grid(X, grid)
    lasso = lasso or lasso_stage(X, grid, cfg)
    path = scad_path(X, grid, cfg, lasso)
    report = bic_select(path, X, cfg.bic_scale)
    fit = path.fits[report.chosen]
    return ScadPipelineResult(SCAD1, fit, report.chosen_lambda, 0, {
        "initializer": "bic-tuned lasso",
        "lasso_lambda": lasso.bic.chosen_lambda,
        "lasso_bic": lasso.bic,
        "scad_bic": report,
    })


def one_step_path(X, grid, init, cfg):
    """One LLA iteration at every grid value, linearized at ``init``.

    Each subproblem is convex, so the solver warm-starts from the previous
    grid value's solution; only the weights depend on ``init``.
    """
    fits = []
    start = init
    for lam in grid:
        w = lla_weights(init, lam, cfg.a)
        fit = fit_weighted_lasso(X, w, start, cfg.inner, lam)
        start = fit.beta
        fit.lla_iters = 1
        fits.append(as_scad_fit(fit, X, lam, cfg.a))
    return SolutionPath(np.asarray(grid, dtype=float), fits)


def scad2(X, grid=None, cfg=None, lasso=None):
    cfg = cfg or LlaConfig()
    X = check_spins(X)
    grid = _grid(X, grid)
    lasso = lasso or lasso_stage(X, grid, cfg)
    first = one_step_path(X, grid, lasso.fit.beta, cfg)
    first_bic = bic_select(first, X, cfg.bic_scale)
    first_fit = first.fits[first_bic.chosen]
    second = one_step_path(X, grid, first_fit.beta, cfg)
    second_bic = bic_select(second, X, cfg.bic_scale)
    fit = second.fits[second_bic.chosen]
    return ScadPipelineResult(SCAD2, fit, second_bic.chosen_lambda, 2, {
        "initializer": "bic-tuned lasso",
        "lasso_lambda": lasso.bic.chosen_lambda,
        "first_pass_lambda": first_bic.chosen_lambda,
        "second_pass_lambda": second_bic.chosen_lambda,
        "lasso_bic": lasso.bic,
        "first_pass_bic": first_bic,
        "second_pass_bic": second_bic,
    })


def scad2_star_star(X, scad2_result, cfg=None):
    cfg = cfg or LlaConfig()
    lam = scad2_result.chosen_lambda
    fit = lla_cma(X, lam, scad2_result.fit.beta, cfg)
    prov = dict(scad2_result.provenance)
    prov["initializer"] = "SCAD2"
    return ScadPipelineResult(SCAD2SS, fit, lam, fit.lla_iters, prov)
