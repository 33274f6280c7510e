from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from statsmodels.tsa.adfvalues import mackinnoncrit, mackinnonp
from statsmodels.tsa.stattools import adfuller

from prodfn.analysis import ReplicationParams, generate_replication_dataset
from prodfn.errors import Inconclusive, InvalidParams, SeriesTooShort, UnsupportedSampleSize, ZeroVariance
from prodfn.series import AnnualSeries, log_transform
from prodfn.unitroot import (
    UnitRootSpec,
    adf_test,
    critical_values,
    default_bandwidth,
    default_max_lags,
    integration_order,
    mackinnon_pvalue,
    pp_test,
    unit_root_test,
)


def walk(seed, n=31, drift=0.0):
    return np.cumsum(drift + np.random.default_rng(seed).standard_normal(n))


def ols_tstat(y, X):
    """t-ratio on column 0 via the textbook normal equations."""
    XtX_inv = np.linalg.inv(X.T @ X)
    b = XtX_inv @ X.T @ y
    e = y - X @ b
    s2 = e @ e / (len(y) - X.shape[1])
    return b[0] / np.sqrt(s2 * XtX_inv[0, 0]), e, np.sqrt(s2 * XtX_inv[0, 0]), np.sqrt(s2)


def adf_regression(y, p):
    dy = np.diff(y)
    m = len(dy) - p
    cols = [y[p:-1]] + [dy[p - j : p - j + m] for j in range(1, p + 1)]
    cols += [np.ones(m), np.arange(m, dtype=float)]
    return dy[p:], np.column_stack(cols)


def test_footnote_critical_values():
    for n, want in ((30, (-4.297, -3.568, -3.218)), (29, (-4.310, -3.574, -3.222))):
        got = critical_values(n, "constant_and_trend")
        assert np.allclose(got, want, atol=0.02)


def test_critical_values_against_statsmodels_surface():
    for det, code in (("none", "n"), ("constant", "c"), ("constant_and_trend", "ct")):
        for n in (15, 30, 100, 400):
            np.testing.assert_allclose(critical_values(n, det), mackinnoncrit(1, code, n), atol=1e-6)
    for N in (2, 3, 4):
        np.testing.assert_allclose(critical_values(50, "constant", N), mackinnoncrit(N, "c", 50), atol=1e-6)


def test_critical_values_ordering_sweep():
    for det in ("none", "constant", "constant_and_trend"):
        for n in range(10, 501):
            cv1, cv5, cv10 = critical_values(n, det)
            assert cv1 < cv5 < cv10


def test_critical_values_reject_tiny_samples():
    with pytest.raises(UnsupportedSampleSize):
        critical_values(9)


def test_pvalue_against_statsmodels():
    for det, code in (("constant", "c"), ("constant_and_trend", "ct"), ("none", "n")):
        for stat in np.linspace(-7, 2, 37):
            assert mackinnon_pvalue(stat, det) == pytest.approx(mackinnonp(stat, code, 1), abs=1e-12)


@pytest.mark.parametrize("p", [0, 1, 3])
def test_adf_matches_independent_ols(p):
    y = walk(11)
    res = adf_test(y, UnitRootSpec(lags=p))
    want, *_ = ols_tstat(*adf_regression(y, p))
    assert res.statistic == pytest.approx(want, abs=1e-10)
    assert res.lags == p and res.n_effective == 30 - p


@pytest.mark.parametrize("p", [0, 2])
@pytest.mark.parametrize("det,code", [("constant", "c"), ("constant_and_trend", "ct"), ("none", "n")])
def test_adf_matches_statsmodels(p, det, code):
    y = walk(3, n=60, drift=0.1)
    res = adf_test(y, UnitRootSpec(deterministics=det, lags=p))
    sm = adfuller(y, maxlag=p, regression=code, autolag=None)
    assert res.statistic == pytest.approx(sm[0], abs=1e-9)
    assert res.n_effective == sm[3]


def test_adf_auto_lag_within_bounds():
    y = walk(4, n=100)
    res = adf_test(y)
    assert 0 <= res.lags <= default_max_lags(100)
    assert set(res.extra["ic"]) == set(range(default_max_lags(100) + 1))
    for ic in ("aic", "bic"):
        assert adf_test(y, UnitRootSpec(ic=ic)).lags <= default_max_lags(100)


def test_rule_of_thumb_defaults():
    assert default_max_lags(100) == 12
    assert default_max_lags(31) == 8
    assert default_bandwidth(100) == 4
    assert default_bandwidth(30) == 3


def test_pp_matches_hand_formula():
    y = walk(21, n=45)
    res = pp_test(y, UnitRootSpec(test_kind="pp", bandwidth=3))
    t, e, se, s = ols_tstat(*adf_regression(y, 0))
    T = len(e)
    g0 = e @ e / T
    lam2 = g0 + 2 * sum((1 - j / 4) * (e[j:] @ e[:-j]) / T for j in (1, 2, 3))
    zt = np.sqrt(g0 / lam2) * t - (lam2 - g0) * T * se / (2 * np.sqrt(lam2) * s)
    assert res.statistic == pytest.approx(zt, abs=1e-10)
    assert res.bandwidth == 3


def test_pp_default_bandwidth_recorded():
    res = pp_test(walk(1), UnitRootSpec(test_kind="pp"))
    assert res.bandwidth == default_bandwidth(30)


def test_too_short_and_bad_specs():
    with pytest.raises(SeriesTooShort):
        adf_test(np.arange(5.0), UnitRootSpec(lags=2))
    with pytest.raises(SeriesTooShort):
        pp_test(np.arange(4.0))
    for bad in ({"deterministics": "quadratic"}, {"lags": -1}, {"ic": "hqic"}, {"alpha": 0.2}, {"test_kind": "kpss"}):
        with pytest.raises(InvalidParams):
            UnitRootSpec(**bad)


def test_result_record_fields():
    res = adf_test(AnnualSeries("lnQ", 1976, walk(8)))
    d = res.to_dict()
    assert d["series"] == "lnQ"
    assert d["decision"] == res.decision
    assert res.cv1 < res.cv5 < res.cv10
    assert 0.0 <= res.pvalue <= 1.0


def test_integration_order_on_replication_series():
    # levels of the generated inputs are random walks with drift; their
    # differences are white noise, where ADF at n=30 has limited power
    pp = UnitRootSpec(test_kind="pp")
    level_unit_root = 0
    verdicts = {"adf": Counter(), "pp": Counter()}
    for seed in range(40):
        d = generate_replication_dataset(ReplicationParams(), seed)
        for col in "QLK":
            s = log_transform(d.series(col))
            level_unit_root += not adf_test(s).rejects
            for key, spec in (("adf", UnitRootSpec()), ("pp", pp)):
                try:
                    verdicts[key][integration_order(s, spec).order] += 1
                except Inconclusive:
                    verdicts[key]["inconclusive"] += 1
    assert level_unit_root / 120 > 0.85
    assert verdicts["pp"][1] / 120 > 0.85
    assert verdicts["adf"].most_common(1)[0][0] == 1


def test_integration_order_trail_and_inconclusive():
    rng = np.random.default_rng(0)
    res = integration_order(rng.standard_normal(200))
    assert res.order == 0 and len(res.trail) == 1
    with pytest.raises(Inconclusive) as info:
        integration_order(np.cumsum(np.cumsum(np.cumsum(rng.standard_normal(60)))), UnitRootSpec(lags=0), max_d=1)
    assert len(info.value.trail) == 2


# The two power examples below are stated for AIC lag selection.  The default
# modified AIC is deliberately conservative under stationarity (it trades
# power for size at n ~ 30) and is checked separately.
AIC = UnitRootSpec(ic="aic")


@pytest.mark.slow
def test_trend_stationary_white_noise_rejects_at_one_percent():
    hits = 0
    for seed in range(200):
        e = np.random.default_rng(seed).standard_normal(500)
        y = 0.5 + 0.01 * np.arange(500) + e
        hits += adf_test(y, AIC.with_(alpha=0.01)).rejects
    assert hits / 200 > 0.99


@pytest.mark.slow
def test_integration_order_monte_carlo():
    white = sum(integration_order(np.random.default_rng(s).standard_normal(200), AIC).order == 0
                for s in range(100))
    assert white >= 95
    twice = 0
    for s in range(100):
        y = np.cumsum(np.cumsum(np.random.default_rng(1000 + s).standard_normal(300)))
        try:
            twice += integration_order(y, AIC).order == 2
        except Inconclusive:
            pass
    # testing upward from levels occasionally rejects in levels for I(2) data
    assert twice >= 80


@pytest.mark.slow
def test_default_lag_rule_power():
    white = sum(integration_order(np.random.default_rng(s).standard_normal(200)).order == 0 for s in range(100))
    assert white >= 85
    hits = sum(adf_test(np.random.default_rng(s).standard_normal(500), UnitRootSpec(alpha=0.01)).rejects
               for s in range(200))
    assert hits / 200 >= 0.98


def _seeded(seed, n, kind):
    e = np.random.default_rng(seed).standard_normal(n)
    return np.cumsum(e) if kind == "walk" else e + 0.05 * np.arange(n)


series_st = st.builds(_seeded, st.integers(0, 2**32 - 1), st.integers(20, 60), st.sampled_from(["walk", "stationary"]))


@settings(max_examples=40, deadline=None)
@given(series_st)
def test_adf_lag0_equals_pp_bandwidth0(v):
    y = np.asarray(v)
    for det in ("none", "constant", "constant_and_trend"):
        a = adf_test(y, UnitRootSpec(deterministics=det, lags=0)).statistic
        b = pp_test(y, UnitRootSpec(deterministics=det, test_kind="pp", bandwidth=0)).statistic
        assert a == pytest.approx(b, abs=1e-10, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(series_st, st.floats(0.01, 100), st.floats(-100, 100))
def test_affine_invariance(v, a, b):
    y = np.asarray(v)
    for det in ("constant", "constant_and_trend"):
        for spec in (UnitRootSpec(deterministics=det, lags=1), UnitRootSpec(deterministics=det, test_kind="pp")):
            f = adf_test if spec.test_kind == "adf" else pp_test
            assert f(a * y + b, spec).statistic == pytest.approx(f(y, spec).statistic, abs=1e-9, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(series_st, st.sampled_from([0.01, 0.05, 0.10]))
def test_decision_follows_statistic(v, alpha):
    res = adf_test(np.asarray(v), UnitRootSpec(alpha=alpha))
    assert res.rejects == (res.statistic < res.critical[alpha])
    assert res.decision == ("stationary" if res.rejects else "unit-root")


@given(st.floats(-8, 1), st.floats(0, 3))
def test_pvalue_monotone(stat, delta):
    assert mackinnon_pvalue(stat) <= mackinnon_pvalue(stat + delta) + 1e-15


@pytest.mark.parametrize("values", [np.full(30, 2.0), np.arange(30.0), 1.0 + 0.5 * np.arange(30.0)])
def test_deterministic_series_raise_zero_variance(values):
    s = AnnualSeries("y", 1976, values)
    for spec in (UnitRootSpec(), UnitRootSpec(ic="aic"), UnitRootSpec(lags=1), UnitRootSpec(test_kind="pp")):
        with pytest.raises(ZeroVariance):
            unit_root_test(s, spec)
