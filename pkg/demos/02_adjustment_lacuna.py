# Correlated regressors: adjustment removes a slice of Y's variance from the books.
import numpy as np

from covadjust import DesignSpec, SimulationConfig, generate_mvn, preset_scenario
from covadjust.decomposition import audit
from covadjust.regression import residualize
from covadjust.report import build_report, format_ledger

d = generate_mvn(SimulationConfig(preset_scenario("COV2"), 10000, seed=2001))
design = DesignSpec("Y", ("X1", "X2"))

# X1 with X2 partialled out keeps only part of its variance
r = residualize(d, "X1", ["X2"])
print("var(X1)", round(np.var(d["X1"], ddof=1), 4), "var(X1.2)", round(np.var(r.values, ddof=1), 4))

a = audit(d, design)
led = a.ledger
print("components", {k: round(v, 4) for k, v in led.component_variance.items()})
print("error", round(led.error_variance, 4), "ledger total", round(led.ledger_total, 4))
print("var(Y)", round(led.outcome_variance, 4))
print("missing from the ledger:", f"{100 * a.areas.shared_fraction:.1f}%")

# two R^2 values, two different denominators
print("against the ledger", round(a.r2.via_variance_components, 4))
print("against var(Y)    ", round(a.r2.conventional_r2, 4))

print()
print(format_ledger(build_report(d, design, {"preset": "COV2"}, seed=2001)))
