import dataclasses

import numpy as np
import pytest
import statsmodels.api as sm
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ar1_design, make_design, random_design
from prodfn.analysis import ReplicationParams, generate_replication_dataset
from prodfn.errors import (
    AllZeroResiduals,
    InsufficientObservations,
    NoConvergence,
    RankDeficient,
    RhoOutOfRange,
    SchemaMismatch,
    SeriesTooShort,
)
from prodfn.estimation import durbin_watson, estimate_ar1, fit_model, hildreth_lu, ols, predict
from prodfn.forms import ModelSpec, build_design
from prodfn.series import AnnualSeries


def test_hand_solved_normal_equations():
    fit = ols(make_design([1, 2, 2], [[1, 0], [1, 1], [1, 2]]))
    assert fit.coefficients["const"] == pytest.approx(7 / 6, abs=1e-14)
    assert fit.coefficients["x1"] == pytest.approx(1 / 2, abs=1e-14)


def test_exact_fit_and_intercept_only():
    x = np.arange(8.0)
    fit = ols(make_design(2 + 3 * x, np.column_stack([np.ones(8), x])))
    assert fit.params == pytest.approx([2.0, 3.0], abs=1e-12)
    assert fit.r2 == 1.0
    assert np.abs(fit.residuals.values).max() < 1e-12
    mean = ols(make_design([2, 4, 6], np.ones((3, 1))))
    assert mean.coefficients["const"] == pytest.approx(4.0)
    assert mean.r2 == 0.0


def test_against_statsmodels_ols(rng):
    dm = random_design(rng, 35, 4)
    fit = ols(dm)
    ref = sm.OLS(dm.response, dm.X).fit()
    np.testing.assert_allclose(fit.params, ref.params, atol=1e-10)
    np.testing.assert_allclose(list(fit.std_errors.values()), ref.bse, rtol=1e-9)
    assert fit.r2 == pytest.approx(ref.rsquared, abs=1e-12)
    assert fit.adj_r2 == pytest.approx(ref.rsquared_adj, abs=1e-12)
    assert fit.f_stat == pytest.approx(ref.fvalue, rel=1e-9)
    assert fit.f_pvalue == pytest.approx(ref.f_pvalue, rel=1e-6, abs=1e-300)
    assert fit.sigma2 == pytest.approx(ref.scale, rel=1e-12)
    np.testing.assert_allclose(list(fit.pvalues.values()), ref.pvalues, rtol=1e-8)


def test_random_instances_match_closed_form(rng):
    for _ in range(50):
        n, k = int(rng.integers(10, 41)), int(rng.integers(1, 7))
        dm = random_design(rng, n, k)
        fit = ols(dm)
        oracle = np.linalg.solve(dm.X.T @ dm.X, dm.X.T @ dm.response)
        np.testing.assert_allclose(fit.params, oracle, rtol=0, atol=1e-10)
        assert np.abs(dm.X.T @ fit.residuals.values).max() < 1e-8


def test_rank_deficiency_names_columns(rng):
    X = np.column_stack([np.ones(10), rng.standard_normal(10), rng.standard_normal(10)])
    X = np.column_stack([X, X[:, 1] * 2.0])
    with pytest.raises(RankDeficient) as info:
        ols(make_design(rng.standard_normal(10), X))
    assert set(info.value.columns) == {"x1", "x3"}
    with pytest.raises(InsufficientObservations):
        ols(make_design([1.0, 2.0], np.column_stack([np.ones(2), [0.0, 1.0]])))


def test_durbin_watson_fixtures():
    assert durbin_watson([1.0, 1.0, 1.0]) == 0.0
    assert durbin_watson([1.0, -1.0, 1.0, -1.0]) == 3.0
    with pytest.raises(SeriesTooShort):
        durbin_watson([1.0])
    with pytest.raises(AllZeroResiduals):
        durbin_watson([0.0, 0.0])


def test_durbin_watson_white_noise(rng):
    assert abs(durbin_watson(rng.standard_normal(10_000)) - 2.0) < 0.05


def test_fit_invariants_on_replication(replication):
    for spec in (ModelSpec(), ModelSpec(ar_error_order=1)):
        dm, fit = fit_model(replication, spec)
        assert 0 <= fit.r2 <= 1 and fit.adj_r2 <= fit.r2
        assert 0 <= fit.dw <= 4
        for name in fit.names:
            assert fit.t_stats[name] == fit.coefficients[name] / fit.std_errors[name]
        y = dm.response[1:] if fit.method == "ar1" else dm.response
        np.testing.assert_allclose(fit.fitted.values + fit.residuals.values, y, atol=1e-10)


def _zero_rho_design(rng, n=25):
    """Data whose adjusted-sample OLS residuals have zero first-order
    autocorrelation, so Cochrane-Orcutt stops at rho = 0."""
    X = np.column_stack([np.ones(n), rng.standard_normal(n), np.arange(n, dtype=float)])
    beta = np.array([1.0, 0.5, 0.1])
    X1 = X[1:]
    e = rng.standard_normal(n - 1)
    e -= X1 @ np.linalg.lstsq(X1, e, rcond=None)[0]
    u0 = -(e[1:] @ e[:-1]) / e[0]
    y = X @ beta + np.concatenate([[u0], e])
    return make_design(y, X), X1, y[1:]


def test_ar1_degenerates_to_ols_when_rho_is_zero(rng):
    dm, X1, y1 = _zero_rho_design(rng)
    fit = estimate_ar1(dm)
    assert abs(fit.rho) < 1e-7  # within a few multiples of the 1e-8 stopping tolerance
    oracle = np.linalg.lstsq(X1, y1, rcond=None)[0]
    np.testing.assert_allclose(fit.params, oracle, atol=1e-6)


def test_ar1_matches_hildreth_lu_grid():
    dm = ar1_design(np.random.default_rng(2024), n=20, rho=0.5)
    fit = estimate_ar1(dm)
    rho_grid, ssr_grid = hildreth_lu(dm, step=1e-4)
    assert abs(fit.rho - rho_grid) < 2e-4
    assert fit.ssr <= ssr_grid + 1e-12
    assert fit.n_effective == 19


def test_ar1_ssr_not_above_ols(rng):
    for _ in range(10):
        dm = ar1_design(rng, n=40, rho=0.7)
        fit = estimate_ar1(dm)
        u = dm.response - dm.X @ ols(dm).params
        assert fit.ssr <= float(u[1:] @ u[1:]) + 1e-12
        eps_at_ols = u[1:] - fit.rho * u[:-1]
        assert fit.ssr <= float(eps_at_ols @ eps_at_ols) + 1e-12


def test_ar1_record_fields():
    dm = ar1_design(np.random.default_rng(1), n=40, rho=0.8)
    fit = estimate_ar1(dm)
    assert fit.method == "ar1"
    assert fit.residuals.start_year == dm.start_year + 1
    assert fit.df_resid == 40 - 1 - 3 - 1
    assert fit.rho_t == pytest.approx(fit.rho / fit.rho_se)
    assert fit.r2_transformed is not None and 0 <= fit.r2_transformed <= 1
    assert fit.iterations >= 1 and fit.last_step < 1e-6
    np.testing.assert_allclose(fit.structural_fitted.values + fit.structural_residuals.values, dm.response)


def test_ar1_noiseless_recovery():
    p = ReplicationParams().with_(innovation_sd=0.0)
    d = generate_replication_dataset(p, seed=3)
    _, fit = fit_model(d, ModelSpec(ar_error_order=1))
    for name, value in p.truth.items():
        if name in fit.coefficients:
            assert fit.coefficients[name] == pytest.approx(value, abs=1e-8)
    assert fit.r2 == 1.0


def test_ar1_errors(rng):
    dm = ar1_design(rng, n=40, rho=0.9)
    with pytest.raises(NoConvergence):
        estimate_ar1(dm, tol=1e-300, max_iter=3, accelerate=False)
    with pytest.raises(InsufficientObservations):
        estimate_ar1(make_design(np.arange(4.0), np.column_stack([np.ones(4), np.arange(4.0)])))
    # an explosive disturbance drives the first residual autocorrelation past 1
    n = 30
    x = np.arange(n, dtype=float)
    u = 1.3 ** x
    with pytest.raises(RhoOutOfRange):
        estimate_ar1(make_design(1 + 0.1 * x + u, np.column_stack([np.ones(n), x])))


def test_predict(rng, replication):
    dm, fit = fit_model(replication, ModelSpec(ar_error_order=1))
    np.testing.assert_allclose(predict(fit, dm).values, fit.structural_fitted.values, atol=1e-12)
    dm0, fit0 = fit_model(replication, ModelSpec())
    np.testing.assert_allclose(predict(fit0, dm0).values, fit0.fitted.values, atol=1e-12)
    zero = dataclasses.replace(fit0, coefficients={n: 0.0 for n in fit0.names})
    assert np.all(predict(zero, dm0).values == 0.0)
    row = np.array([[1.0, 5.0, 4.0, 40.0]])
    new = make_design([0.0], row, names=dm0.names)
    assert predict(fit0, new).values[0] == pytest.approx(float(row[0] @ fit0.params), abs=1e-14)
    with pytest.raises(SchemaMismatch):
        predict(fit0, build_design(replication, "translog"))


def test_irrelevant_column_effects():
    adj_drop = []
    for seed in range(200):
        rng = np.random.default_rng(seed)
        dm = random_design(rng, 30, 3)
        extra = make_design(dm.response, np.column_stack([dm.X, rng.standard_normal(30)]))
        a, b = ols(dm), ols(extra)
        assert b.r2 >= a.r2 - 1e-12
        adj_drop.append(a.adj_r2 - b.adj_r2)
    assert np.mean(adj_drop) > 0


@pytest.mark.slow
def test_gauss_markov_unbiased():
    beta = np.array([1.0, -2.0, 0.5])
    rng = np.random.default_rng(99)
    X = np.column_stack([np.ones(30), rng.standard_normal((30, 2))])
    est = np.array([ols(make_design(X @ beta + rng.standard_normal(30), X)).params for _ in range(2000)])
    se = est.std(axis=0, ddof=1) / np.sqrt(len(est))
    assert np.all(np.abs(est.mean(axis=0) - beta) < 4 * se)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(8, 40), st.integers(1, 5))
def test_ols_invariants(seed, n, k):
    rng = np.random.default_rng(seed)
    dm = random_design(rng, n, min(k, n - 2))
    fit = ols(dm)
    assert 0.0 <= fit.r2 <= 1.0 and fit.adj_r2 <= fit.r2
    assert 0.0 <= fit.dw <= 4.0
    np.testing.assert_allclose(fit.fitted.values + fit.residuals.values, dm.response, atol=1e-10)
    scale = np.abs(dm.X).max(axis=0) * max(1.0, np.abs(dm.response).max())
    assert np.all(np.abs(dm.X.T @ fit.residuals.values) / scale < 1e-8)
    for name in fit.names:
        assert fit.t_stats[name] == fit.coefficients[name] / fit.std_errors[name]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-0.8, 0.8))
def test_ar1_invariants(seed, rho):
    dm = ar1_design(np.random.default_rng(seed), n=30, rho=rho)
    fit = estimate_ar1(dm)
    assert abs(fit.rho) < 1
    assert 0 <= fit.dw <= 4
    np.testing.assert_allclose(fit.fitted.values + fit.residuals.values, dm.response[1:], atol=1e-10)
    assert isinstance(fit.residuals, AnnualSeries) and len(fit.residuals) == 29
