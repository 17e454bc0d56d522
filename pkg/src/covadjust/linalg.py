"""Small dense linear algebra: Cholesky, SPD solves, sample covariance.

Matrices here are at most a dozen rows on a side (covariance specs and
normal equations), so a plain column-by-column Cholesky is all we need.
"""

import warnings

import numpy as np

from .errors import IllConditionedWarning, InsufficientRows, NotPositiveDefinite

#: pivots below this fraction of the largest diagonal entry trigger a warning
PIVOT_WARN_RTOL = 1e-10


def as_symmetric(m):
    """Return `m` as a float array, checking it is square and exactly symmetric."""
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix is not symmetric")
    return a


def _factor(a):
    # Returns (L, pivots); raises on the first non-positive pivot.
    k = a.shape[0]
    L = np.zeros_like(a)
    pivots = np.empty(k)
    for j in range(k):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > 0.0:
            raise NotPositiveDefinite(
                f"matrix is not positive definite (pivot {j} = {pivot:.6g})"
            )
        pivots[j] = pivot
        L[j, j] = np.sqrt(pivot)
        L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L, pivots


def cholesky(m):
    """Lower-triangular ``L`` with ``L @ L.T == m``.

    Raises `NotPositiveDefinite` when a pivot is <= 0 and emits an
    `IllConditionedWarning` when a pivot falls below
    ``PIVOT_WARN_RTOL * max(diag(m))``.
    """
    a = as_symmetric(m)
    L, pivots = _factor(a)
    if pivots.min() < PIVOT_WARN_RTOL * np.max(np.diag(a)):
        warnings.warn(
            f"near-singular matrix: smallest Cholesky pivot {pivots.min():.3g}",
            IllConditionedWarning,
            stacklevel=2,
        )
    return L


def cho_solve(L, rhs):
    """Solve ``L L^T x = rhs`` by forward then back substitution."""
    b = np.array(rhs, dtype=float)
    k = L.shape[0]
    if b.shape[0] != k:
        raise ValueError(f"rhs has length {b.shape[0]}, expected {k}")
    y = np.empty_like(b)
    for i in range(k):
        y[i] = (b[i] - L[i, :i] @ y[:i]) / L[i, i]
    x = np.empty_like(b)
    for i in range(k - 1, -1, -1):
        x[i] = (y[i] - L[i + 1:, i] @ x[i + 1:]) / L[i, i]
    return x


def solve_spd(m, rhs):
    """Solve ``m x = rhs`` for symmetric positive-definite ``m``."""
    return cho_solve(cholesky(m), rhs)


def sample_covariance(columns):
    """Unbiased (divisor n-1) covariance matrix of equal-length columns.

    >>> sample_covariance([[1, 2, 3], [1, 2, 3]]).tolist()
    [[1.0, 1.0], [1.0, 1.0]]
    """
    x = np.array(columns, dtype=float)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    if x.ndim != 2:
        raise ValueError("columns must be a list of equal-length vectors")
    n = x.shape[1]
    if n < 2:
        raise InsufficientRows(f"need at least 2 rows, got {n}")
    xc = x - x.mean(axis=1, keepdims=True)
    cov = xc @ xc.T / (n - 1)
    # mirror the upper triangle so the result is symmetric bit-for-bit
    upper = np.triu(cov)
    return upper + np.triu(cov, 1).T
