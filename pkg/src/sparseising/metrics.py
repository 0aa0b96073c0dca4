"""Estimation and selection metrics."""

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .model import as_values, composite_loglik


@dataclass
class MetricReport:
    nde: int
    mse: Optional[float] = None
    fdr: Optional[float] = None
    me: Optional[float] = None

    def to_dict(self):
        return {k: v for k, v in asdict(self).items() if v is not None}


def metrics(beta_hat, truth, double_count=False):
    """MSE, NDE and FDR of an estimate against the true couplings.

    MSE sums squared errors over unordered pairs; ``double_count`` counts
    each pair twice (both triangles of the coupling matrix).
    """
    est = as_values(beta_hat)
    true = as_values(getattr(truth, "beta_star", truth))
    if est.shape != true.shape:
        raise ValueError(f"estimate has {est.size} pairs, truth has {true.size}")
    selected = est != 0
    nde = int(selected.sum())
    false = int((selected & (true == 0)).sum())
    mse = float(np.sum((est - true) ** 2)) * (2 if double_count else 1)
    return MetricReport(nde=nde, mse=mse, fdr=false / max(nde, 1))


def model_error(beta_hat, test):
    """Negative composite log-likelihood on held-out data."""
    return -composite_loglik(beta_hat, test)
