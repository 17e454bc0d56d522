# Unique sums of squares three ways on one small dataset.
import numpy as np

from covadjust import Dataset, DesignSpec, fit_ols
from covadjust.decomposition import type3_decomposition

rng = np.random.default_rng(12)
n = 60
x1 = rng.normal(size=n)
x2 = 0.6 * x1 + rng.normal(size=n)
x3 = rng.normal(size=n) - 0.3 * x2
y = 1.0 + 2.0 * x1 - 1.0 * x2 + 0.5 * x3 + rng.normal(size=n)
d = Dataset(["Y", "X1", "X2", "X3"], np.column_stack([y, x1, x2, x3]))
full = DesignSpec("Y", ("X1", "X2", "X3"))

ss = type3_decomposition(d, full)

# drop each regressor in turn and watch SSE grow
for nm in full.regressors:
    rest = tuple(r for r in full.regressors if r != nm)
    grow = fit_ols(d, DesignSpec("Y", rest)).sse - fit_ols(d, full).sse
    print(nm, round(ss.per_regressor_ss[nm], 6), round(grow, 6))

# the pieces no longer add up once regressors overlap
print("parts + SSE", round(ss.total_by_parts, 4), "total", round(ss.corrected_total_ss, 4))
