import decimal
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prodfn.errors import DataError, EmptyIntersection, InvalidParams, NonPositiveValue, SeriesTooShort
from prodfn.series import (
    AnnualSeries,
    Dataset,
    align,
    cagr,
    difference,
    growth_rate,
    lag,
    log_transform,
    mean_growth,
)

positive = st.floats(min_value=1e-3, max_value=1e6, allow_nan=False, allow_infinity=False)
values = st.lists(positive, min_size=3, max_size=40)


def test_series_rejects_empty_and_non_finite():
    with pytest.raises(DataError):
        AnnualSeries("x", 2000, [])
    with pytest.raises(DataError, match="2001"):
        AnnualSeries("x", 2000, [1.0, float("nan")])
    with pytest.raises(DataError):
        AnnualSeries("x", 2000, [1.0, float("inf")])


def test_series_is_read_only():
    s = AnnualSeries("x", 2000, [1.0, 2.0])
    with pytest.raises(ValueError):
        s.values[0] = 3.0


def test_from_mapping_refuses_holes():
    assert AnnualSeries.from_mapping("x", {2001: 2.0, 2000: 1.0}).values.tolist() == [1.0, 2.0]
    with pytest.raises(DataError):
        AnnualSeries.from_mapping("x", {2000: 1.0, 2002: 2.0})


def test_log_exact_points():
    s = AnnualSeries("Q", 1976, [1.0, math.e, math.e**2])
    np.testing.assert_allclose(log_transform(s).values, [0.0, 1.0, 2.0], atol=1e-15)
    assert np.all(log_transform(AnnualSeries("c", 1976, [1.0] * 4)).values == 0.0)


def test_log_against_decimal_oracle():
    decimal.getcontext().prec = 40
    out = log_transform(AnnualSeries("Q", 1976, [2.0, 3.0])).values
    for v, x in zip(out, (2, 3)):
        assert abs(v - float(decimal.Decimal(x).ln())) < 1e-12


def test_log_rejects_non_positive_with_year():
    with pytest.raises(NonPositiveValue) as info:
        log_transform(AnnualSeries("Q", 1976, [1.0, 0.0, 2.0]))
    assert info.value.year == 1977


def test_difference_examples():
    d = difference(AnnualSeries("x", 1990, [1.0, 3.0, 6.0]))
    assert d.values.tolist() == [2.0, 3.0]
    assert d.start_year == 1991
    assert np.all(difference(AnnualSeries("c", 1990, [4.0] * 5)).values == 0.0)
    with pytest.raises(SeriesTooShort):
        difference(AnnualSeries("x", 1990, [1.0, 2.0]), 2)
    with pytest.raises(InvalidParams):
        difference(AnnualSeries("x", 1990, [1.0, 2.0]), 0)


def test_difference_recovers_random_walk_increments(rng):
    steps = rng.standard_normal(50)
    walk = AnnualSeries("rw", 1950, np.concatenate([[0.0], np.cumsum(steps)]))
    # cumulative sums are not exactly invertible in floating point; compare
    # against the generator's own partial sums instead
    sums = np.concatenate([[0.0], np.cumsum(steps)])
    assert np.array_equal(difference(walk).values, sums[1:] - sums[:-1])
    np.testing.assert_allclose(difference(walk).values, steps, atol=1e-12)


def test_lag_examples():
    s = AnnualSeries("x", 2000, [5.0, 7.0, 9.0])
    out = lag(s, 1)
    assert out.values.tolist() == [5.0, 7.0] and out.start_year == 2001 and out.end_year == 2002
    assert lag(lag(s, 1), 1).values.tolist() == lag(s, 2).values.tolist()
    assert lag(lag(s, 1), 1).start_year == lag(s, 2).start_year
    with pytest.raises(SeriesTooShort):
        lag(s, 3)


def test_lag_and_difference_commute(rng):
    s = AnnualSeries("x", 2000, rng.standard_normal(10))
    a, b = difference(lag(s, 1)), lag(difference(s), 1)
    assert a.start_year == b.start_year
    assert np.array_equal(a.values, b.values)


def test_align_examples():
    a = AnnualSeries("a", 1976, np.arange(31.0))
    b = AnnualSeries("b", 1975, np.arange(28.0))
    d = align([a, b])
    assert (d.start_year, d.end_year) == (1976, 2002)
    assert d["T"].tolist() == list(range(27))
    assert d["a"][0] == 0.0 and d["b"][0] == 1.0
    same = align([a, a.renamed("c")])
    assert (same.start_year, same.end_year) == (1976, 2006)
    assert same["T"].tolist() == list(range(31))


def test_align_brute_force_intersection(rng):
    for _ in range(20):
        spans = []
        for name in "abc":
            start = int(rng.integers(1950, 1970))
            spans.append(AnnualSeries(name, start, rng.standard_normal(int(rng.integers(15, 40)))))
        shared = set.intersection(*(set(s.years.tolist()) for s in spans))
        if not shared:
            with pytest.raises(EmptyIntersection):
                align(spans)
            continue
        d = align(spans)
        assert d.years.tolist() == sorted(shared)
        for s in spans:
            assert np.array_equal(d[s.name], [s[y] for y in sorted(shared)])


def test_align_disjoint_raises():
    with pytest.raises(EmptyIntersection):
        align([AnnualSeries("a", 1950, [1.0, 2.0]), AnnualSeries("b", 1960, [1.0])])
    with pytest.raises(EmptyIntersection):
        align([])


def test_cagr_examples():
    assert cagr(AnnualSeries("x", 2000, [100.0, 110.0, 121.0])) == pytest.approx(0.10, abs=1e-12)
    assert cagr(AnnualSeries("x", 2000, [7.0] * 6)) == 0.0
    with pytest.raises(SeriesTooShort):
        cagr(AnnualSeries("x", 2000, [1.0]))
    with pytest.raises(NonPositiveValue):
        cagr(AnnualSeries("x", 2000, [-1.0, 2.0]))


def test_growth_conventions_differ_on_uneven_paths():
    s = AnnualSeries("x", 2000, [100.0, 150.0, 120.0])
    assert growth_rate(s) == cagr(s)
    assert growth_rate(s, "arithmetic") == mean_growth(s) == pytest.approx((0.5 - 0.2) / 2)
    with pytest.raises(InvalidParams):
        growth_rate(s, "harmonic")


def test_dataset_rejects_ragged_columns():
    with pytest.raises(DataError):
        Dataset(2000, {"a": [1.0, 2.0], "b": [1.0]})


@given(values)
def test_difference_of_log_is_log_growth(v):
    s = AnnualSeries("x", 1990, v)
    got = difference(log_transform(s)).values
    want = np.log(np.asarray(v[1:]) / np.asarray(v[:-1]))
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-12)


@given(values, st.floats(min_value=1e-3, max_value=1e3))
def test_cagr_scale_invariant(v, c):
    s = AnnualSeries("x", 1990, v)
    scaled = AnnualSeries("x", 1990, np.asarray(v) * c)
    assert cagr(scaled) == pytest.approx(cagr(s), rel=1e-9, abs=1e-12)


@given(st.lists(st.integers(1900, 1904), min_size=1, max_size=4), st.integers(5, 30))
def test_align_idempotent(starts, length):
    d = align([AnnualSeries(f"s{j}", y, np.arange(length, dtype=float) + j) for j, y in enumerate(starts)])
    assert align(d) == d


@settings(max_examples=25)
@given(values)
def test_transforms_are_pure(v):
    s = AnnualSeries("x", 1990, v)
    for f in (log_transform, difference, lambda x: lag(x, 1)):
        a, b = f(s), f(s)
        assert a == b
    assert np.array_equal(s.values, v)
