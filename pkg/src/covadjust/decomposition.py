"""Type III sums of squares, variance-components ledger and Ballantine areas.

Every quantity is built from the residualized regressors ``X_j.rest``:

* ``SS(X_j | rest) = b_j.rest * sum(X_j.rest * Y)``
* component variance ``b_j.rest**2 * var(X_j.rest)``
* ledger total ``sum(components) + var(residuals)``

When the regressors are sample-orthogonal the ledger total equals
``var(Y)``. Otherwise the gap ``var(Y) - ledger_total`` is the variance the
adjusted model no longer accounts for (the shared area, or lacuna).

Variances use divisor n-1; sums of squares are raw cross-products, so
``SS / (n-1)`` and the matching component variance agree.
"""

import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .errors import SuppressionWarning
from .regression import (
    fit_ols,
    fwl_coefficient,
    residualize_all,
    standardized_coefficients,
)

#: regressors with |sample correlation| above this count as "adjusted"
ADJUSTED_CORR_TOL = 1e-8
# a shared area this close to zero (relative to var(Y)) is roundoff, not suppression
SHARED_RTOL = 1e-10


@dataclass(frozen=True)
class SSDecomposition:
    per_regressor_ss: dict
    sse: float
    total_by_parts: float
    corrected_total_ss: float
    n: int

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class VarianceLedger:
    component_variance: dict
    error_variance: float
    model_variance: float
    ledger_total: float
    outcome_variance: float
    adjusted: bool

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class BallantineAreas:
    unique_areas: dict
    error_area: float
    shared_area: float
    reference_total: float

    @property
    def shared_fraction(self):
        return self.shared_area / self.reference_total

    @property
    def suppression(self):
        return self.shared_area < -SHARED_RTOL * abs(self.reference_total)

    def to_dict(self):
        out = asdict(self)
        out["shared_fraction"] = self.shared_fraction
        out["suppression"] = self.suppression
        return out


@dataclass(frozen=True)
class R2Routes:
    """R-squared computed four ways against the ledger, plus the usual one.

    The first four ("adjusted-population" R-squared) are algebraically
    identical. ``conventional_r2`` divides by the corrected total sum of
    squares of Y ("original-population" R-squared); the two coincide only
    when the regressors are sample-orthogonal.
    """

    via_total_minus_error: float
    via_ss_ratio: float
    via_variance_components: float
    via_squared_betas: float
    conventional_r2: float

    @property
    def ledger_routes(self):
        return (
            self.via_total_minus_error,
            self.via_ss_ratio,
            self.via_variance_components,
            self.via_squared_betas,
        )

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class _Parts:
    fit: object
    residualized: dict
    adjusted_b: dict
    cross_products: dict
    y: np.ndarray


def _parts(d, spec):
    fit = fit_ols(d, spec)
    res = residualize_all(d, spec)
    y = d.column(spec.outcome)
    adjusted_b = {nm: fwl_coefficient(d, r, spec.outcome) for nm, r in res.items()}
    cross = {nm: float(r.values @ y) for nm, r in res.items()}
    return _Parts(fit, res, adjusted_b, cross, y)


def _is_adjusted(d, spec):
    X = np.column_stack([d.column(nm) for nm in spec.regressors])
    if X.shape[1] < 2:
        return False
    corr = np.corrcoef(X, rowvar=False)
    off = corr[~np.eye(corr.shape[0], dtype=bool)]
    return bool(np.any(np.abs(off) > ADJUSTED_CORR_TOL))


def _ss(p, n):
    per = {nm: p.adjusted_b[nm] * p.cross_products[nm] for nm in p.adjusted_b}
    sse = p.fit.sse
    y = p.y
    corrected = float(y @ y - y.sum() ** 2 / n)
    return SSDecomposition(
        per_regressor_ss=per,
        sse=sse,
        total_by_parts=sum(per.values()) + sse,
        corrected_total_ss=corrected,
        n=n,
    )


def _ledger(p, adjusted):
    comp = {
        nm: p.adjusted_b[nm] ** 2 * float(np.var(r.values, ddof=1))
        for nm, r in p.residualized.items()
    }
    error_var = float(np.var(p.fit.residuals, ddof=1))
    model_var = sum(comp.values())
    return VarianceLedger(
        component_variance=comp,
        error_variance=error_var,
        model_variance=model_var,
        ledger_total=model_var + error_var,
        outcome_variance=float(np.var(p.y, ddof=1)),
        adjusted=adjusted,
    )


def _areas(ledger):
    shared = ledger.outcome_variance - ledger.ledger_total
    if shared < -SHARED_RTOL * ledger.outcome_variance:
        warnings.warn(
            f"negative shared area {shared:.6g}: regressors act as suppressors",
            SuppressionWarning,
            stacklevel=3,
        )
    return BallantineAreas(
        unique_areas=dict(ledger.component_variance),
        error_area=ledger.error_variance,
        shared_area=shared,
        reference_total=ledger.outcome_variance,
    )


def _r2(p, ss, ledger):
    parts_total = ss.total_by_parts
    model_ss = sum(ss.per_regressor_ss.values())
    betas = standardized_coefficients(p.fit, np.sqrt(ledger.ledger_total))
    return R2Routes(
        via_total_minus_error=(parts_total - ss.sse) / parts_total,
        via_ss_ratio=model_ss / (model_ss + ss.sse),
        via_variance_components=ledger.model_variance / ledger.ledger_total,
        via_squared_betas=sum(b * b for b in betas.values()),
        conventional_r2=1.0 - ss.sse / ss.corrected_total_ss,
    )


def type3_decomposition(d, spec):
    """Unique (Type III) sums of squares for every regressor, plus totals."""
    return _ss(_parts(d, spec), d.n)


def variance_ledger(d, spec):
    return _ledger(_parts(d, spec), _is_adjusted(d, spec))


def ballantine_areas(d, spec):
    """Unique, error and shared areas; the shared area may be negative."""
    return _areas(variance_ledger(d, spec))


def r2_routes(d, spec):
    p = _parts(d, spec)
    return _r2(p, _ss(p, d.n), _ledger(p, _is_adjusted(d, spec)))


@dataclass(frozen=True)
class Audit:
    """Everything computed for one dataset and design, from a single fit."""

    fit: object
    adjusted_coefficients: dict
    standardized: dict
    ss: SSDecomposition
    ledger: VarianceLedger
    areas: BallantineAreas
    r2: R2Routes


def audit(d, spec):
    """Run the whole decomposition once and bundle the results."""
    p = _parts(d, spec)
    ss = _ss(p, d.n)
    ledger = _ledger(p, _is_adjusted(d, spec))
    return Audit(
        fit=p.fit,
        adjusted_coefficients=dict(p.adjusted_b),
        standardized=standardized_coefficients(p.fit, np.sqrt(ledger.ledger_total)),
        ss=ss,
        ledger=ledger,
        areas=_areas(ledger),
        r2=_r2(p, ss, ledger),
    )
