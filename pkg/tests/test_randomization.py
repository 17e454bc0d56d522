import numpy as np
import pytest

from covadjust.errors import ConfigError
from covadjust.randomization import (
    Policy,
    TrialConfig,
    _draw,
    imbalance_rejection_rate,
    replication_study,
    simulate_trial,
)
from covadjust.simulate import CovarianceSpec, make_rng, preset_scenario

ONE_COVARIATE = CovarianceSpec(("Y", "X1"), np.array([[2.0, 0.65], [0.65, 0.6]]))


def trial(n=100, spec=None, alpha=0.05, seed=11):
    return TrialConfig(n, spec or preset_scenario("COV2"), alpha, seed)


def test_config_validation():
    with pytest.raises(ConfigError):
        trial(n=7)
    with pytest.raises(ConfigError):
        trial(n=2)
    with pytest.raises(ConfigError):
        trial(alpha=1.0)
    with pytest.raises(ConfigError):
        TrialConfig(10, ONE_COVARIATE, seed=-1)
    reserved = CovarianceSpec(("Y", "arm"), np.eye(2))
    with pytest.raises(ConfigError):
        trial(spec=reserved)


def test_policy_parse():
    assert Policy.parse("NeverAdjust") is Policy.NEVER
    assert Policy.parse("always") is Policy.ALWAYS
    assert Policy.parse("adjust_if_imbalanced") is Policy.REACTIVE
    assert Policy.parse(Policy.REACTIVE) is Policy.REACTIVE
    with pytest.raises(ConfigError):
        Policy.parse("sometimes")


def test_assignment_is_an_exact_split():
    cfg = trial(n=30)
    for i in range(20):
        _, arm, res = _draw(cfg, make_rng(cfg.replication_seed(i)))
        assert arm.sum() == 15
        assert set(np.unique(arm)) == {0.0, 1.0}
        assert all(0.0 <= p <= 1.0 for p in res.per_covariate_p.values())


def test_simulate_trial_is_deterministic():
    a = simulate_trial(trial(seed=5))
    b = simulate_trial(trial(seed=5))
    assert a == b
    assert set(a.per_covariate_p) == {"X1", "X2"}


def test_needs_enough_replications():
    with pytest.raises(ConfigError):
        imbalance_rejection_rate(trial(), 99)


def test_rejection_rate_two_covariates():
    R, alpha = 4000, 0.05
    rates = imbalance_rejection_rate(trial(), R)
    band = 3 * np.sqrt(alpha * (1 - alpha) / R)
    for rate in rates.per_covariate.values():
        assert abs(rate - alpha) <= band
    # correlated covariates: the family-wise rate sits between alpha and 1-(1-alpha)^2
    assert alpha - band <= rates.family_wise <= 1 - (1 - alpha) ** 2 + band


def test_tiny_alpha_never_rejects():
    rates = imbalance_rejection_rate(trial(alpha=1e-6), 2000)
    assert rates.family_wise == 0.0


def test_imbalance_shrinks_with_n():
    small = imbalance_rejection_rate(trial(n=20, spec=ONE_COVARIATE), 1000)
    large = imbalance_rejection_rate(trial(n=2000, spec=ONE_COVARIATE), 1000)
    assert large.mean_abs_imbalance < small.mean_abs_imbalance / 5


def test_null_effect_unbiased():
    s = replication_study(trial(), 0.0, Policy.NEVER, 2000)
    assert abs(s.estimate_mean) <= 3 * s.estimate_sd / np.sqrt(2000)
    assert s.distinct_models == 1
    assert s.composition_variability == 0.0


def test_always_adjust_is_more_precise():
    never = replication_study(trial(), 1.0, Policy.NEVER, 1000)
    always = replication_study(trial(), 1.0, Policy.ALWAYS, 1000)
    assert always.estimate_sd < never.estimate_sd


def test_reactive_policy_changes_the_model():
    s = replication_study(trial(), 1.0, "reactive", 1000)
    assert s.distinct_models > 1
    assert s.composition_variability > 0.0
    for rec in s.records:
        rejected = {nm for nm, p in rec.pvalues.items() if p < 0.05}
        assert set(rec.selected) == rejected


def test_parallel_matches_serial():
    serial = replication_study(trial(), 1.0, Policy.REACTIVE, 200)
    parallel = replication_study(trial(), 1.0, Policy.REACTIVE, 200, workers=2)
    assert serial == parallel
    assert serial.records == parallel.records


def test_summary_dict():
    s = replication_study(trial(), 1.0, Policy.ALWAYS, 100)
    doc = s.to_dict()
    assert doc["policy"] == "always"
    assert doc["replications"] == 100
    assert 0.0 <= doc["rejection_rate"] <= 1.0
    assert doc["estimate_sd"] >= 0.0
