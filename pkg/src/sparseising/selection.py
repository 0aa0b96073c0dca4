"""BIC tuning along a solution path."""

from dataclasses import dataclass

import numpy as np

from .model import check_spins, composite_loglik


@dataclass
class BicReport:
    lambdas: np.ndarray
    scores: np.ndarray
    df: np.ndarray
    loglik: np.ndarray
    chosen: int

    @property
    def chosen_lambda(self):
        return float(self.lambdas[self.chosen])

    def rows(self):
        return [
            {"lambda": float(l), "df": int(d), "loglik": float(ll), "bic": float(s)}
            for l, d, ll, s in zip(self.lambdas, self.df, self.loglik, self.scores)
        ]


def bic_scores(loglik, df, N, scale="total"):
    """``2 N l_c - log(N) df`` (``scale="total"``) or the literal
    ``2 l_c - log(N) df`` on the averaged likelihood (``scale="mean"``)."""
    loglik = np.asarray(loglik, dtype=float)
    df = np.asarray(df, dtype=float)
    if scale == "total":
        fit_term = 2.0 * N * loglik
    elif scale == "mean":
        fit_term = 2.0 * loglik
    else:
        raise ValueError(f"unknown BIC scale {scale!r}")
    return fit_term - np.log(N) * df


def bic_select(path, X, scale="total"):
    """Pick the path element with the largest BIC score.

    Ties go to the earliest element, i.e. the largest lambda on a
    decreasing grid.
    """
    if len(path.fits) == 0:
        raise ValueError("cannot select from an empty path")
    X = check_spins(X)
    N = X.shape[0]
    loglik = np.array([composite_loglik(f.beta, X) for f in path.fits])
    df = np.array([np.count_nonzero(f.beta) for f in path.fits])
    scores = bic_scores(loglik, df, N, scale)
    return BicReport(np.asarray(path.lambdas, dtype=float), scores, df, loglik,
                     int(np.argmax(scores)))
