"""LASSO and SCAD penalties."""

from dataclasses import dataclass

import numpy as np

LASSO = "lasso"
SCAD = "scad"


@dataclass(frozen=True)
class Penalty:
    kind: str
    lam: float
    a: float = 3.7

    def __post_init__(self):
        if self.kind not in (LASSO, SCAD):
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if not self.lam >= 0:
            raise ValueError("lambda must be nonnegative")
        if self.kind == SCAD and not self.a > 2:
            raise ValueError("SCAD requires a > 2")

    def deriv(self, t):
        return penalty_deriv(self, t)

    def value(self, t):
        return penalty_value(self, t)

    def total(self, beta):
        """Sum of the penalty over the absolute coupling values."""
        return float(np.sum(penalty_value(self, np.abs(beta))))


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise ValueError("penalty argument must be nonnegative")
    return t


def penalty_deriv(p, t):
    """P'_lambda(t) for t >= 0.

    SCAD uses the left-closed branch at t == lambda.
    """
    t = _check_t(t)
    lam = p.lam
    if p.kind == LASSO:
        out = np.full_like(t, lam)
    else:
        out = np.where(t <= lam, lam, np.maximum(p.a * lam - t, 0.0) / (p.a - 1.0))
    return out[()] if out.ndim == 0 else out


def penalty_value(p, t):
    """P_lambda(t), the integral of :func:`penalty_deriv` from 0 to t."""
    t = _check_t(t)
    lam, a = p.lam, p.a
    if p.kind == LASSO:
        out = lam * t
    else:
        mid = (2 * a * lam * t - t * t - lam * lam) / (2 * (a - 1))
        out = np.where(t <= lam, lam * t,
                       np.where(t <= a * lam, mid, (a + 1) * lam * lam / 2))
    out = np.asarray(out, dtype=float)
    return out[()] if out.ndim == 0 else out
