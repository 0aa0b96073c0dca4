"""Support-recovery checks on a strong-signal chain model.

K=15 with the first ten chain links active, couplings of magnitude in
[1, 2], N=2000 Gibbs draws, 20 seeds. All pipelines are fitted once per
seed and shared across the tests below.
"""

import numpy as np
import pytest

from oracles import restricted_newton
from sparseising.cma import FitResult, SolutionPath
from sparseising.lla import LlaConfig, lasso_stage, lla_cma, scad1, scad2, scad2_star_star
from sparseising.model import n_pairs
from sparseising.selection import bic_select
from sparseising.simulate import GibbsConfig, chain_graph, gen_truth, gibbs_sample

pytestmark = pytest.mark.slow

K, S, N, SEEDS = 15, 10, 2000, 20


def oracle_lambda():
    return 2.5 * np.sqrt(np.log(n_pairs(K)) / N)


def dummy_fit(beta):
    return FitResult(beta=beta, lam=0.0, objective=0.0, loglik=0.0, sweeps=0,
                     kkt_residual=0.0, converged=True)


@pytest.fixture(scope="module")
def runs():
    cfg = LlaConfig()
    out = []
    for seed in range(SEEDS):
        truth = gen_truth(chain_graph(K, S), seed)
        X = gibbs_sample(truth, N, GibbsConfig(seed=seed))
        support = truth.beta_star.values != 0
        lasso = lasso_stage(X, None, cfg)
        r1 = scad1(X, None, cfg, lasso)
        r2 = scad2(X, None, cfg, lasso)
        rss = scad2_star_star(X, r2, cfg)
        lla = lla_cma(X, oracle_lambda(), lasso.fit.beta, cfg)
        oracle = restricted_newton(X, np.flatnonzero(support), K)
        out.append(dict(X=X, support=support, s1=r1.fit.beta, s2=r2.fit.beta,
                        ss=rss.fit.beta, lla=lla, oracle=oracle))
    return out


def rate(runs, key):
    return np.mean([np.array_equal(r[key] != 0, r["support"]) for r in runs])


def test_scad1_recovers_support(runs):
    assert rate(runs, "s1") >= 0.8


def test_scad2_recovers_support_at_least_as_often_as_scad1(runs):
    assert rate(runs, "s2") >= rate(runs, "s1")


def test_scad2_equals_oracle(runs):
    hits = [np.array_equal(r["s2"] != 0, r["support"])
            and np.max(np.abs(r["s2"] - r["oracle"])) < 1e-4 for r in runs]
    assert np.mean(hits) >= 0.8


def test_scad2_star_star_keeps_scad2_support(runs):
    same = [np.array_equal(r["ss"] != 0, r["s2"] != 0) for r in runs]
    assert np.mean(same) >= 0.95


def test_lla_from_tuned_lasso_stabilizes_by_second_iteration(runs):
    ok = [r["lla"].lla_iters <= 2 for r in runs]
    assert np.mean(ok) >= 0.9


def test_bic_prefers_true_model_over_empty(runs):
    wins = []
    for r in runs:
        path = SolutionPath(np.array([1.0, 0.5]),
                            [dummy_fit(np.zeros(n_pairs(K))), dummy_fit(r["oracle"])])
        wins.append(bic_select(path, r["X"]).chosen == 1)
    assert np.mean(wins) >= 0.95
