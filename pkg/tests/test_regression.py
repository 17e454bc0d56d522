import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from covadjust.dataset import Dataset
from covadjust.errors import NonPositiveSd, RankDeficient, UnknownColumn, ZeroVariance
from covadjust.regression import (
    DesignSpec,
    fit_ols,
    fwl_coefficient,
    residualize,
    residualize_all,
    standardized_coefficients,
)
from covadjust.simulate import SimulationConfig, generate_mvn, preset_scenario
from oracles import (
    COV1,
    COV2,
    design_condition,
    exact_sample,
    lstsq_sse,
    population_values,
    random_regression_data,
    rel_close,
)

DESIGN = DesignSpec("Y", ("X1", "X2"))


def exact_dataset(cov, n=1000, seed=0):
    return Dataset(["Y", "X1", "X2"], exact_sample(cov, n, seed))


def random_dataset(seed, k=None, n=None):
    names, values = random_regression_data(seed, k, n)
    return Dataset(names, values), DesignSpec("Y", tuple(names[1:]))


def property_dataset(seed, k=None):
    d, spec = random_dataset(seed, k)
    # a rare draw is collinear enough to be refused as rank deficient
    assume(design_condition(d.values) < 1e4)
    return d, spec


def test_design_spec_validation():
    with pytest.raises(ValueError):
        DesignSpec("Y", ())
    with pytest.raises(ValueError):
        DesignSpec("Y", ("X1", "X1"))
    with pytest.raises(ValueError):
        DesignSpec("Y", ("Y", "X1"))


def test_identity_fit():
    x = np.random.default_rng(0).normal(size=40)
    fit = fit_ols(Dataset(["Y", "X1"], np.column_stack([x, x])), DesignSpec("Y", ("X1",)))
    assert fit.coefficients["X1"] == pytest.approx(1.0, rel=1e-12)
    assert fit.sse == pytest.approx(0.0, abs=1e-20)


def test_matches_lstsq():
    d, spec = random_dataset(3)
    fit = fit_ols(d, spec)
    X = np.column_stack([d[r] for r in spec.regressors])
    sse, coef = lstsq_sse(d["Y"], X)
    np.testing.assert_allclose([fit.intercept, *fit.coefficients.values()], coef, rtol=1e-9)
    assert fit.sse == pytest.approx(sse, rel=1e-9)


@pytest.mark.parametrize("cov", [COV1, COV2], ids=["COV1", "COV2"])
def test_exact_population_coefficients(cov):
    pop = population_values(cov)
    fit = fit_ols(exact_dataset(cov), DESIGN)
    np.testing.assert_allclose(list(fit.coefficients.values()), pop["b"], rtol=1e-9)
    np.testing.assert_allclose(list(fit.partial_sd.values()), np.sqrt(pop["partial_var"]), rtol=1e-9)


def test_published_coefficients_analytic():
    np.testing.assert_allclose(population_values(COV1)["b"], 1.0833333, atol=1e-7)
    np.testing.assert_allclose(population_values(COV2)["b"], 0.7647059, atol=1e-7)


def test_cov2_sample_coefficients():
    d = generate_mvn(SimulationConfig(preset_scenario("COV2"), 10000, seed=17))
    fit = fit_ols(d, DESIGN)
    for b in fit.coefficients.values():
        assert abs(b - 0.7647059) < 0.03


def test_rank_deficient():
    x = np.random.default_rng(0).normal(size=(30, 2))
    d = Dataset(["Y", "X1", "X2"], np.column_stack([x[:, 0], x[:, 1], 2 * x[:, 1] + 1]))
    with pytest.raises(RankDeficient):
        fit_ols(d, DESIGN)
    const = Dataset(["Y", "X1"], np.column_stack([x[:, 0], np.full(30, 3.0)]))
    with pytest.raises(RankDeficient):
        fit_ols(const, DesignSpec("Y", ("X1",)))
    # three rows cannot pin down an intercept and two slopes with any residual
    too_short = Dataset(["Y", "X1", "X2"], [[1.0, 0.0, 1.0], [2.0, 1.0, 0.0], [0.5, 2.0, 2.0]])
    with pytest.raises(RankDeficient):
        fit_ols(too_short, DESIGN)


def test_unknown_regressor():
    d, _ = random_dataset(0, k=2)
    with pytest.raises(UnknownColumn):
        fit_ols(d, DesignSpec("Y", ("X1", "Q")))


def test_residualize_orthogonal_target_is_centered():
    cov = np.diag([2.0, 0.6, 0.6])
    cov[0, 1:] = cov[1:, 0] = 0.65
    d = exact_dataset(cov)
    r = residualize(d, "X1", ["X2"])
    np.testing.assert_allclose(r.values, d["X1"] - d["X1"].mean(), atol=1e-10)
    assert set(r.auxiliary_coefficients) == {"const", "X2"}


def test_residualize_on_itself_is_zero():
    d, _ = random_dataset(1, k=3)
    r = residualize(d, "X1", ["X1", "X2"])
    assert np.abs(r.values).max() < 1e-10


def test_residualize_cov2_variance():
    d = generate_mvn(SimulationConfig(preset_scenario("COV2"), 10000, seed=5))
    r = residualize(d, "X1", ["X2"])
    assert abs(np.var(r.values, ddof=1) - 0.4958333) < 0.015


def test_residualized_values_orthogonal_and_centered():
    d, spec = random_dataset(8, k=5)
    for nm, r in residualize_all(d, spec).items():
        assert abs(r.values.sum()) <= 1e-9 * d.n * np.abs(r.values).max()
        for other in r.removed_from:
            assert abs(r.values @ d[other]) <= 1e-9 * np.linalg.norm(r.values) * np.linalg.norm(d[other])


def test_raw_and_centered_cross_products_agree():
    d, spec = random_dataset(4, k=3)
    y = d["Y"]
    for r in residualize_all(d, spec).values():
        assert r.values @ y == pytest.approx(r.values @ (y - y.mean()), rel=1e-9)


def test_fwl_zero_for_orthogonal_outcome():
    rng = np.random.default_rng(2)
    x = rng.normal(size=100)
    x -= x.mean()
    y = rng.normal(size=100)
    y -= (y @ x) / (x @ x) * x
    d = Dataset(["Y", "X1"], np.column_stack([y, x]))
    assert abs(fwl_coefficient(d, residualize(d, "X1", []))) < 1e-12


def test_fwl_zero_variance():
    x = np.random.default_rng(0).normal(size=20)
    d = Dataset(["Y", "X1"], np.column_stack([x, x]))
    r = residualize(d, "X1", ["X1"])
    with pytest.raises(ZeroVariance):
        fwl_coefficient(d, r)


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_fwl_identity_property(seed):
    d, spec = property_dataset(seed)
    fit = fit_ols(d, spec)
    yc = d["Y"] - d["Y"].mean()
    Xc = np.column_stack([d[nm] - d[nm].mean() for nm in spec.regressors])
    cond = np.linalg.cond(Xc / np.linalg.norm(Xc, axis=0))
    for nm, r in residualize_all(d, spec).items():
        # sum(r*Y) inherits r's roundoff orthogonality error (~eps * cond)
        # scaled by |Y|/|r|; that swamps a small coefficient near collinearity
        natural = 100 * np.finfo(float).eps * cond * np.linalg.norm(yc) / np.linalg.norm(r.values) / 1e-9
        assert rel_close(fwl_coefficient(d, r, "Y"), fit.coefficients[nm], 1e-9, natural)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_residuals_orthogonal_property(seed):
    d, spec = property_dataset(seed)
    fit = fit_ols(d, spec)
    e = fit.residuals
    assert abs(e.sum()) <= 1e-9 * d.n * np.abs(e).max()
    assert fit.sse == pytest.approx(float(e @ e), rel=1e-12)
    for nm in (*spec.regressors, None):
        col = fit.predict(d) if nm is None else d[nm]
        assert abs(e @ col) <= 1e-9 * np.linalg.norm(e) * np.linalg.norm(col)
    np.testing.assert_allclose(d["Y"] - fit.predict(d), e, atol=1e-9 * np.abs(d["Y"]).max())


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_adding_orthogonal_regressor_keeps_coefficients(seed):
    d, spec = property_dataset(seed, k=2)
    rng = np.random.default_rng(seed)
    z = rng.normal(size=d.n)
    X = np.column_stack([np.ones(d.n), d["X1"], d["X2"]])
    z -= X @ np.linalg.lstsq(X, z, rcond=None)[0]
    bigger = Dataset([*d.column_names, "Z"], np.column_stack([d.values, z]))
    before = fit_ols(d, spec).coefficients
    after = fit_ols(bigger, DesignSpec("Y", ("X1", "X2", "Z"))).coefficients
    for nm in before:
        assert rel_close(after[nm], before[nm], 1e-9, 1e-6 * d["Y"].std() / d[nm].std())


def test_standardized_examples():
    for cov, expected in ((COV1, 0.59334), (COV2, 0.42760)):
        pop = population_values(cov)
        fit = fit_ols(exact_dataset(cov), DESIGN)
        beta = standardized_coefficients(fit, np.sqrt(pop["ledger"]))
        np.testing.assert_allclose(list(beta.values()), pop["beta"], rtol=1e-9)
        assert beta["X1"] == pytest.approx(expected, abs=5e-5)


def test_standardized_zero_and_invalid_sd():
    rng = np.random.default_rng(0)
    x = rng.normal(size=200)
    y = rng.normal(size=200)
    y -= (y @ (x - x.mean())) / ((x - x.mean()) @ (x - x.mean())) * (x - x.mean())
    fit = fit_ols(Dataset(["Y", "X1"], np.column_stack([y, x])), DesignSpec("Y", ("X1",)))
    assert abs(standardized_coefficients(fit, 1.0)["X1"]) < 1e-12
    with pytest.raises(NonPositiveSd):
        standardized_coefficients(fit, 0.0)


def test_near_collinear_draw_is_refused():
    names, values = random_regression_data(42462)
    assert design_condition(values) > 1e6
    d = Dataset(names, values)
    with pytest.raises(RankDeficient):
        fit_ols(d, DesignSpec("Y", tuple(names[1:])))
