# Randomized arms still differ at baseline, exactly as often as alpha says.
import numpy as np

from covadjust import preset_scenario
from covadjust.randomization import Policy, TrialConfig, imbalance_rejection_rate, replication_study

spec = preset_scenario("COV2")
cfg = TrialConfig(100, spec, alpha=0.05, seed=2001)

rates = imbalance_rejection_rate(cfg, 5000)
print("per covariate", rates.per_covariate)
print("either covariate", rates.family_wise)

# imbalance shrinks like 1/sqrt(n)
for n in (20, 80, 320, 1280):
    r = imbalance_rejection_rate(TrialConfig(n, spec, seed=n), 1000)
    print(n, round(r.mean_abs_imbalance, 4), round(r.mean_abs_imbalance * np.sqrt(n), 3))

# chasing imbalance changes the model from trial to trial; all three stay unbiased
for policy in Policy:
    s = replication_study(cfg, effect=1.0, policy=policy, replications=2000)
    print(policy.value, round(s.estimate_mean, 4), round(s.estimate_sd, 4), s.distinct_models)
