import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prodfn.errors import EmptyDataset, InvalidParams, NonPositiveValue, SchemaMismatch
from prodfn.estimation import ols
from prodfn.forms import (
    ALL_FORMS,
    WAR_YEARS,
    DesignMatrix,
    FunctionalForm,
    ModelSpec,
    build_design,
    column_names,
    war_dummy,
)
from prodfn.series import Dataset


def one_row(L, K, Q=1.0):
    return Dataset(2000, {"Q": [Q], "L": [L], "K": [K]})


def test_seven_forms():
    assert len(ALL_FORMS) == 7
    assert {f.value for f in ALL_FORMS} == {
        "cd_unrestricted", "cd_tinbergen", "cd_restricted_percapita",
        "cd_restricted_tinbergen_percapita", "transcendental", "debertin", "translog",
    }


def test_tinbergen_design_shape(replication):
    dm = build_design(replication, ModelSpec(FunctionalForm.CD_TINBERGEN))
    assert dm.X.shape == (31, 4)
    assert dm.names == ("const", "lnK", "lnL", "T")
    assert dm.response_name == "lnQ"
    np.testing.assert_array_equal(dm.column("T"), np.arange(31.0))


def test_translog_row_at_e():
    dm = build_design(one_row(math.e, math.e), "translog")
    np.testing.assert_allclose(dm.X[0], np.ones(6), rtol=1e-15)


def test_debertin_row_by_hand():
    dm = build_design(one_row(2.0, 3.0), "debertin")
    want = [1.0, math.log(2), math.log(3), 2.0, 3.0, 6.0]
    assert dm.names == ("const", "lnL", "lnK", "L", "K", "KL")
    np.testing.assert_allclose(dm.X[0], want, rtol=1e-15)


def test_transcendental_and_percapita_rows():
    dm = build_design(one_row(2.0, 3.0, Q=5.0), "transcendental")
    np.testing.assert_allclose(dm.X[0], [1.0, 2.0, math.log(2), 3.0, math.log(3)], rtol=1e-15)
    pc = build_design(one_row(2.0, 3.0, Q=5.0), "cd_restricted_tinbergen_percapita")
    assert pc.response_name == "lnQ_L"
    assert pc.response[0] == pytest.approx(math.log(5 / 2))
    np.testing.assert_allclose(pc.X[0], [1.0, math.log(3 / 2), 0.0])


@pytest.mark.parametrize("form", ALL_FORMS)
def test_columns_are_exactly_the_form_terms(form, small_dataset):
    dm = build_design(small_dataset, form)
    assert dm.names == column_names(form)
    assert dm.names[0] == "const"
    assert len(set(dm.names)) == len(dm.names)
    war = build_design(small_dataset, ModelSpec(form, include_war_dummy=True))
    assert war.names == column_names(form) + ("war",)


def test_war_dummy_spans():
    assert WAR_YEARS == (1980, 1988)
    d = war_dummy(1976, 2006)
    assert d.values.sum() == 9
    assert [int(y) for y, v in zip(d.years, d.values) if v] == list(range(1980, 1989))
    assert war_dummy(1990, 2006).values.sum() == 0
    assert war_dummy(1980, 1980).values.tolist() == [1.0]
    with pytest.raises(EmptyDataset):
        war_dummy(2000, 1999)


def test_build_design_errors():
    with pytest.raises(NonPositiveValue):
        build_design(Dataset(2000, {"Q": [1.0, 2.0], "L": [1.0, -1.0], "K": [1.0, 1.0]}), "cd_unrestricted")
    with pytest.raises(EmptyDataset):
        build_design(Dataset(2000, {"Q": [], "L": [], "K": []}), "cd_unrestricted")
    with pytest.raises(InvalidParams):
        ModelSpec(ar_error_order=2)
    with pytest.raises(ValueError):
        ModelSpec(form="ces")


def test_design_matrix_invariants():
    with pytest.raises(SchemaMismatch):
        DesignMatrix("y", [1.0, 2.0], ("x", "const"), np.ones((2, 2)), 2000)
    with pytest.raises(SchemaMismatch):
        DesignMatrix("y", [1.0, 2.0], ("const", "const"), np.ones((2, 2)), 2000)
    with pytest.raises(SchemaMismatch):
        DesignMatrix("y", [1.0, 2.0, 3.0], ("const",), np.ones((2, 1)), 2000)


def test_restricted_form_equals_substituted_unrestricted(rng):
    # y = a + b lnK + (1 - b) lnL + e  <=>  y - lnL = a + b (lnK - lnL) + e
    n = 40
    L = np.exp(np.cumsum(0.02 + 0.05 * rng.standard_normal(n)) + 3)
    K = np.exp(np.cumsum(0.03 + 0.05 * rng.standard_normal(n)) + 4)
    Q = np.exp(0.7 + 0.35 * np.log(K) + 0.65 * np.log(L) + 0.03 * rng.standard_normal(n))
    d = Dataset(1970, {"Q": Q, "L": L, "K": K})
    restricted = ols(build_design(d, "cd_restricted_percapita"))
    # constrained least squares on the unrestricted design by substitution
    full = build_design(d, "cd_unrestricted")
    lnK, lnL = full.column("lnK"), full.column("lnL")
    Z = np.column_stack([np.ones(n), lnK - lnL])
    coef, *_ = np.linalg.lstsq(Z, full.response - lnL, rcond=None)
    assert restricted.coefficients["const"] == pytest.approx(coef[0], abs=1e-9)
    assert restricted.coefficients["lnK_L"] == pytest.approx(coef[1], abs=1e-9)
    implied_labour = 1 - restricted.coefficients["lnK_L"]
    fitted = coef[0] + coef[1] * lnK + implied_labour * lnL
    np.testing.assert_allclose(restricted.structural_fitted.values + lnL, fitted, atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(ALL_FORMS), st.booleans())
def test_design_is_deterministic(seed, form, war):
    rng = np.random.default_rng(seed)
    n = 12
    d = Dataset(1978, {c: rng.uniform(1, 100, n) for c in "QLK"})
    spec = ModelSpec(form, include_war_dummy=war)
    a, b = build_design(d, spec), build_design(d, spec)
    assert a.names == b.names
    assert np.array_equal(a.X, b.X) and np.array_equal(a.response, b.response)
