"""Stability selection over random half-samples."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .estimators import canonical_name, estimate
from .model import check_spins, n_pairs


@dataclass
class StabilityReport:
    estimator: str
    frequencies: np.ndarray
    pi_thr: float
    q_avg: float
    ev_bound: float
    reps: int
    failed: int
    subsample_size: int
    seed: int

    @property
    def stable(self):
        return np.flatnonzero(self.frequencies > self.pi_thr)


def ev_bound(q_avg, p, pi_thr):
    """Upper bound ``q^2 / (p (2 pi - 1))`` on the expected number of
    falsely selected edges among the stable set."""
    if not 0.5 < pi_thr <= 1.0:
        raise ValueError("the bound needs 0.5 < pi_thr <= 1")
    return q_avg ** 2 / (p * (2 * pi_thr - 1))


def subsample_indices(N, size, seed, rep):
    rng = np.random.default_rng([seed, rep])
    return np.sort(rng.choice(N, size=size, replace=False))


def stability_select(X, estimator, reps=100, subsample_size=None, pi_thr=0.9, seed=0,
                     cfg=None, threads=1, **estimate_kw):
    """Refit ``estimator`` (with its own BIC tuning) on ``reps`` subsamples
    drawn without replacement and record how often each pair is selected.

    Replicate ``r`` draws its subsample from a generator seeded by
    ``(seed, r)``, so results do not depend on ``threads``. Replicates
    that raise are counted in ``failed`` and left out of the frequencies.
    Extra keyword arguments go to :func:`estimate`.
    """
    name = canonical_name(estimator)
    X = check_spins(X)
    N, K = X.shape
    if reps < 1:
        raise ValueError("reps must be at least 1")
    size = N // 2 if subsample_size is None else int(subsample_size)
    if not 1 <= size <= N:
        raise ValueError(f"subsample size must be in [1, {N}]")
    p = n_pairs(K)

    def one(rep):
        idx = subsample_indices(N, size, seed, rep)
        try:
            return estimate(X[idx], name, cfg=cfg, **estimate_kw).beta != 0
        except (ValueError, FloatingPointError, ArithmeticError):
            return None

    if threads <= 1:
        results = [one(r) for r in range(reps)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(reps)))

    ok = [r for r in results if r is not None]
    failed = reps - len(ok)
    if ok:
        sel = np.array(ok)
        freq = sel.mean(axis=0)
        q_avg = float(sel.sum(axis=1).mean())
    else:
        freq = np.zeros(p)
        q_avg = 0.0
    return StabilityReport(name, freq, pi_thr, q_avg, ev_bound(q_avg, p, pi_thr),
                           reps, failed, size, seed)
