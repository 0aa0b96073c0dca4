"""Named end-to-end estimators with their BIC tuning, as used by the CLI
and by stability selection."""

from dataclasses import dataclass, field

import numpy as np

from .baselines import aggregate_nsai, aggregate_nsau, neighborhood_select, relaxed_refit
from .cma import DEFAULT_GRID_RATIO, DEFAULT_GRID_SIZE, lambda_grid, lambda_max
from .lla import LlaConfig, lasso_stage, scad1, scad2, scad2_star_star
from .model import check_spins

ESTIMATORS = ("lasso", "scad1", "scad2", "scad2starstar",
              "nsai", "nsau", "nsai-relax", "nsau-relax")

_ALIASES = {"scad2**": "scad2starstar", "scad2ss": "scad2starstar"}


def canonical_name(name):
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in ESTIMATORS:
        raise ValueError(f"unknown estimator {name!r}; choose from {', '.join(ESTIMATORS)}")
    return key


@dataclass
class Estimate:
    name: str
    beta: np.ndarray
    chosen_lambda: float
    converged: bool
    diagnostics: dict = field(default_factory=dict)


def _fit_diag(fit):
    return {"objective": fit.objective, "loglik": fit.loglik, "sweeps": fit.sweeps,
            "kkt_residual": fit.kkt_residual, "converged": bool(fit.converged),
            "df": fit.df}


def estimate(X, name, cfg=None, threads=1, tuning="node", n_lambda=DEFAULT_GRID_SIZE,
             ratio=DEFAULT_GRID_RATIO):
    """Run estimator ``name`` on spins ``X`` and return the tuned estimate.

    Every estimator tunes by BIC over a geometric grid of ``n_lambda`` values
    from its lambda max down to ``ratio`` times it. ``threads`` only affects
    the neighborhood estimators, whose node problems are independent.
    """
    name = canonical_name(name)
    cfg = cfg or LlaConfig()
    X = check_spins(X)
    if name in ("nsai", "nsau", "nsai-relax", "nsau-relax"):
        nf = neighborhood_select(X, cfg.inner, tuning, None, threads, n_lambda, ratio)
        diag = {"node_lambdas": nf.lambdas.tolist(), "tuning": tuning}
        converged = bool(nf.converged.all())
        if name.endswith("relax"):
            nf = relaxed_refit(X, nf, threads=threads)
            diag["separated_nodes"] = np.flatnonzero(nf.separated).tolist()
            converged = converged and bool(nf.converged.all())
        agg = aggregate_nsai if name.startswith("nsai") else aggregate_nsau
        return Estimate(name, agg(nf), float("nan"), converged, diag)

    lmax = lambda_max(X)
    if not lmax > 0:
        raise ValueError("lambda max is zero: every empirical pair product averages to 0")
    grid = lambda_grid(lmax, n_lambda, ratio)
    lasso = lasso_stage(X, grid, cfg)
    if name == "lasso":
        fit = lasso.fit
        diag = _fit_diag(fit)
        diag["bic"] = lasso.bic.rows()
        diag["path_converged"] = all(f.converged for f in lasso.path.fits)
        return Estimate(name, fit.beta, lasso.bic.chosen_lambda, diag["path_converged"], diag)

    if name == "scad1":
        res = scad1(X, grid, cfg, lasso)
    else:
        res = scad2(X, grid, cfg, lasso)
        if name == "scad2starstar":
            res = scad2_star_star(X, res, cfg)
    diag = _fit_diag(res.fit)
    diag["lla_iters"] = res.lla_iters_used
    for key, value in res.provenance.items():
        diag[key] = value.rows() if hasattr(value, "rows") else value
    return Estimate(name, res.fit.beta, res.chosen_lambda, bool(res.fit.converged), diag)
