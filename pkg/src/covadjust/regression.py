"""Ordinary least squares and Frisch-Waugh-Lovell residualization.

Fits always carry an intercept. The normal equations are solved on
centered regressors scaled to a unit-diagonal cross-product matrix, then
polished with a couple of steps of iterative refinement. A Cholesky pivot
below `RANK_RTOL` on that matrix means the design is collinear and
`RankDeficient` is raised instead of returning garbage.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NonPositiveSd,
    NotPositiveDefinite,
    RankDeficient,
    UnknownColumn,
    ZeroVariance,
)
from .linalg import _factor, cho_solve

RANK_RTOL = 1e-10
REFINE_STEPS = 2


@dataclass(frozen=True)
class DesignSpec:
    outcome: str
    regressors: tuple
    intercept: bool = True

    def __post_init__(self):
        regs = tuple(self.regressors)
        object.__setattr__(self, "regressors", regs)
        if not regs:
            raise ValueError("a design needs at least one regressor")
        if len(set(regs)) != len(regs):
            raise ValueError(f"regressors must be distinct: {regs}")
        if self.outcome in regs:
            raise ValueError(f"outcome {self.outcome!r} cannot also be a regressor")
        if not self.intercept:
            raise ValueError("only designs with an intercept are supported")

    @classmethod
    def default_for(cls, d):
        """First column as outcome, the rest as regressors."""
        names = d.column_names
        return cls(names[0], tuple(names[1:]))


@dataclass(frozen=True)
class FittedModel:
    """An OLS fit.

    ``partial_sd[j]`` is the standard deviation (divisor n-1) of regressor
    j after partialling out the other regressors, read off the inverse
    cross-product matrix.
    """

    intercept: float
    coefficients: dict
    residuals: np.ndarray = field(repr=False)
    sse: float
    design: DesignSpec
    partial_sd: dict

    @property
    def n(self):
        return self.residuals.shape[0]

    def predict(self, d):
        yhat = np.full(d.n, self.intercept)
        for name, b in self.coefficients.items():
            yhat = yhat + b * d.column(name)
        return yhat


@dataclass(frozen=True)
class ResidualizedRegressor:
    name: str
    values: np.ndarray = field(repr=False)
    auxiliary_coefficients: dict
    removed_from: tuple


def _ols(y, X):
    """Least squares of `y` on `X` plus intercept.

    Returns ``(b0, b, residuals, partial_ss)`` where ``partial_ss[j]`` is the
    residual sum of squares of column j regressed on the other columns.
    """
    n, k = X.shape
    if n <= k + 1:
        raise RankDeficient(f"need more than {k + 1} rows to fit {k} regressors, got {n}")
    xbar = X.mean(axis=0)
    ybar = y.mean()
    Xc = X - xbar
    yc = y - ybar
    gram_diag = np.einsum("ij,ij->j", Xc, Xc)
    ref = np.einsum("ij,ij->j", X, X)
    # centering roundoff on a constant column leaves ~1e-16 relative residue
    if np.any(gram_diag <= 1e-20 * np.maximum(ref, np.finfo(float).tiny)):
        raise RankDeficient("a regressor is constant")
    s = np.sqrt(gram_diag)
    Z = Xc / s
    C = Z.T @ Z
    C = (C + C.T) / 2.0
    np.fill_diagonal(C, 1.0)
    try:
        L, pivots = _factor(C)
    except NotPositiveDefinite:
        raise RankDeficient("regressors are collinear") from None
    if pivots.min() < RANK_RTOL:
        raise RankDeficient(
            f"regressors are collinear (smallest pivot {pivots.min():.3g})"
        )
    g = cho_solve(L, Z.T @ yc)
    resid = yc - Z @ g
    # normal equations lose accuracy as cond(Z)**2; refining against the
    # data-space residual recovers most of it
    for _ in range(REFINE_STEPS):
        g = g + cho_solve(L, Z.T @ resid)
        resid = yc - Z @ g
    b = g / s
    b0 = ybar - xbar @ b
    # 1 / (C^{-1})_jj is the residual sum of squares of scaled column j on
    # the others; refine C^{-1} the same way as the coefficients
    eye = np.eye(k)
    U = cho_solve(L, eye)
    for _ in range(REFINE_STEPS):
        U = U + cho_solve(L, eye - Z.T @ (Z @ U))
    partial_ss = gram_diag / np.diag(U)
    return float(b0), b, resid, partial_ss


def _columns(d, names):
    for nm in names:
        if nm not in d:
            raise UnknownColumn(nm)
    return np.column_stack([d.column(nm) for nm in names])


def fit_ols(d, spec):
    """Regress ``spec.outcome`` on ``spec.regressors`` with an intercept."""
    y = _columns(d, [spec.outcome])[:, 0]
    X = _columns(d, spec.regressors)
    b0, b, resid, partial_ss = _ols(y, X)
    resid.setflags(write=False)
    dof = d.n - 1
    return FittedModel(
        intercept=b0,
        coefficients=dict(zip(spec.regressors, map(float, b))),
        residuals=resid,
        sse=float(resid @ resid),
        design=spec,
        partial_sd={nm: float(np.sqrt(ss / dof)) for nm, ss in zip(spec.regressors, partial_ss)},
    )


def residualize(d, target, others):
    """Residual of `target` after regressing it on `others` plus an intercept.

    With no `others` this is simply the centered column.
    """
    others = tuple(others)
    x = _columns(d, [target])[:, 0]
    if not others:
        c0 = float(x.mean())
        values = x - c0
        coefs = {"const": c0}
    else:
        c0, c, values, _ = _ols(x, _columns(d, others))
        coefs = {"const": c0, **dict(zip(others, map(float, c)))}
    values.setflags(write=False)
    return ResidualizedRegressor(
        name=target, values=values, auxiliary_coefficients=coefs, removed_from=others
    )


def residualize_all(d, spec):
    """Each regressor residualized on all the other regressors in `spec`."""
    regs = spec.regressors
    return {
        nm: residualize(d, nm, tuple(r for r in regs if r != nm)) for nm in regs
    }


def fwl_coefficient(d, r, outcome=None):
    """Slope of the outcome on a residualized regressor: sum(r*y) / sum(r^2).

    `outcome` defaults to the dataset's first column.
    """
    y = d.column(outcome if outcome is not None else d.column_names[0])
    ss = float(r.values @ r.values)
    if ss < 1e-12 * d.n:
        raise ZeroVariance(f"residualized {r.name!r} has no variance left")
    return float(r.values @ y) / ss


def standardized_coefficients(model, ledger_sd):
    """beta_j = b_j * sd(X_j.rest) / ledger_sd for each regressor."""
    if not ledger_sd > 0:
        raise NonPositiveSd(f"ledger sd must be positive, got {ledger_sd}")
    return {
        nm: float(b * model.partial_sd[nm] / ledger_sd)
        for nm, b in model.coefficients.items()
    }
