# Two regressors that share nothing: adjusting one for the other changes nothing.
import numpy as np

from covadjust import DesignSpec, SimulationConfig, generate_mvn, preset_scenario
from covadjust.decomposition import audit

spec = preset_scenario("COV1")
print(spec.matrix)

d = generate_mvn(SimulationConfig(spec, 10000, seed=2001))
a = audit(d, DesignSpec("Y", ("X1", "X2")))

# marginal slope vs adjusted slope, per regressor
for nm in ("X1", "X2"):
    x = d[nm] - d[nm].mean()
    marginal = x @ d["Y"] / (x @ x)
    print(nm, round(marginal, 4), round(a.adjusted_coefficients[nm], 4))

# the population answer is 0.65 / 0.60
print("population b", 0.65 / 0.60)

# sums of squares add up to the total, up to the sample's stray correlation
print("SS by parts", round(a.ss.total_by_parts, 2), "SS total", round(a.ss.corrected_total_ss, 2))
print("R^2 four ways", np.round(a.r2.ledger_routes, 4), "usual", round(a.r2.conventional_r2, 4))
