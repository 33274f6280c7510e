"""Year-indexed annual series and the elementary transforms built on them."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DataError,
    EmptyIntersection,
    InvalidParams,
    NonPositiveValue,
    SchemaMismatch,
    SeriesTooShort,
)

__all__ = [
    "AnnualSeries",
    "Dataset",
    "log_transform",
    "difference",
    "lag",
    "align",
    "cagr",
    "mean_growth",
    "growth_rate",
]

TREND = "T"


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AnnualSeries:
    """A named run of consecutive annual observations.

    Parameters
    ----------
    name : str
        Label carried through transforms.
    start_year : int
        Calendar year of the first value.
    values : array_like
        One finite value per consecutive year.
    """

    name: str
    start_year: int
    values: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.values)
        if arr.size == 0:
            raise DataError(f"series {self.name!r} is empty")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise DataError(
                f"series {self.name!r} has a non-finite value at year {self.start_year + bad}"
            )
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "start_year", int(self.start_year))

    @classmethod
    def from_mapping(cls, name: str, data: Mapping[int, float]) -> "AnnualSeries":
        """Build from a ``year -> value`` mapping that has no holes."""
        if not data:
            raise DataError(f"series {name!r} is empty")
        years = sorted(data)
        if years[-1] - years[0] + 1 != len(years):
            raise DataError(f"series {name!r} has missing years")
        return cls(name, years[0], [data[y] for y in years])

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, AnnualSeries):
            return NotImplemented
        return (
            self.name == other.name
            and self.start_year == other.start_year
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self) -> str:
        return f"AnnualSeries({self.name!r}, {self.start_year}-{self.end_year}, n={len(self)})"

    @property
    def end_year(self) -> int:
        return self.start_year + len(self) - 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.end_year + 1)

    def __getitem__(self, year: int) -> float:
        i = int(year) - self.start_year
        if not 0 <= i < len(self):
            raise KeyError(year)
        return float(self.values[i])

    def to_dict(self) -> dict[int, float]:
        return {int(y): float(v) for y, v in zip(self.years, self.values)}

    def renamed(self, name: str) -> "AnnualSeries":
        return AnnualSeries(name, self.start_year, self.values)

    def window(self, first: int, last: int) -> "AnnualSeries":
        """Restrict to ``first..last`` inclusive (must lie inside the span)."""
        if first < self.start_year or last > self.end_year or first > last:
            raise DataError(
                f"window {first}-{last} outside {self.name!r} span "
                f"{self.start_year}-{self.end_year}"
            )
        i = first - self.start_year
        return AnnualSeries(self.name, first, self.values[i : i + last - first + 1])


def log_transform(s: AnnualSeries) -> AnnualSeries:
    """Element-wise natural logarithm.  Raises NonPositiveValue on any v <= 0."""
    bad = np.flatnonzero(s.values <= 0)
    if bad.size:
        raise NonPositiveValue(s.start_year + int(bad[0]), s.name)
    return AnnualSeries(f"ln{s.name}", s.start_year, np.log(s.values))


def difference(s: AnnualSeries, order: int = 1) -> AnnualSeries:
    if order < 1:
        raise InvalidParams("order must be a positive integer")
    if len(s) <= order:
        raise SeriesTooShort(f"{s.name!r} has {len(s)} values, cannot difference {order} times")
    return AnnualSeries(f"D{order}.{s.name}" if order > 1 else f"D.{s.name}",
                        s.start_year + order, np.diff(s.values, n=order))


def lag(s: AnnualSeries, k: int) -> AnnualSeries:
    """Shift so that year t carries the value observed at t - k."""
    if k < 1:
        raise InvalidParams("k must be a positive integer")
    if len(s) <= k:
        raise SeriesTooShort(f"{s.name!r} has {len(s)} values, cannot lag by {k}")
    return AnnualSeries(f"L{k}.{s.name}", s.start_year + k, s.values[:-k])


@dataclass(frozen=True, eq=False)
class Dataset:
    """Aligned columns over a common span, plus the trend column ``T``.

    ``columns`` maps names to read-only arrays of equal length; ``T`` runs
    0, 1, 2, ... from ``start_year``.
    """

    start_year: int
    columns: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        cols = {k: _frozen(v) for k, v in self.columns.items()}
        lengths = {v.size for v in cols.values()}
        if len(lengths) > 1:
            raise SchemaMismatch("dataset columns have unequal lengths")
        n = lengths.pop() if lengths else 0
        if TREND not in cols:
            cols[TREND] = _frozen(np.arange(n, dtype=float))
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "start_year", int(self.start_year))

    def __len__(self) -> int:
        return self.columns[TREND].size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.start_year == other.start_year
            and list(self.columns) == list(other.columns)
            and all(np.array_equal(self.columns[k], other.columns[k]) for k in self.columns)
        )

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise SchemaMismatch(f"dataset has no column {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    def __repr__(self) -> str:
        return f"Dataset({self.start_year}-{self.end_year}, columns={self.names})"

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    @property
    def end_year(self) -> int:
        return self.start_year + len(self) - 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.start_year + len(self))

    def series(self, name: str) -> AnnualSeries:
        return AnnualSeries(name, self.start_year, self[name])

    def to_series(self) -> list[AnnualSeries]:
        """All non-trend columns as series (the inverse of :func:`align`)."""
        return [self.series(k) for k in self.columns if k != TREND]


def align(series: Sequence[AnnualSeries] | Dataset) -> Dataset:
    """Trim every series to the common year range and attach the trend.

    Accepts a Dataset as well, in which case it is re-aligned from its own
    columns (a no-op).
    """
    if isinstance(series, Dataset):
        series = series.to_series()
    series = list(series)
    if not series:
        raise EmptyIntersection("no series to align")
    names = [s.name for s in series]
    if len(set(names)) != len(names):
        raise SchemaMismatch(f"duplicate series names: {names}")
    if TREND in names:
        raise SchemaMismatch(f"{TREND!r} is reserved for the trend column")
    first = max(s.start_year for s in series)
    last = min(s.end_year for s in series)
    if first > last:
        raise EmptyIntersection(
            "series spans do not overlap: "
            + ", ".join(f"{s.name} {s.start_year}-{s.end_year}" for s in series)
        )
    return Dataset(first, {s.name: s.window(first, last).values for s in series})


def cagr(s: AnnualSeries) -> float:
    """Compound annual growth rate, (last/first)**(1/(n-1)) - 1."""
    if len(s) < 2:
        raise SeriesTooShort("growth rate needs at least two observations")
    first, last = s.values[0], s.values[-1]
    if first <= 0:
        raise NonPositiveValue(s.start_year, s.name)
    if last <= 0:
        raise NonPositiveValue(s.end_year, s.name)
    return float((last / first) ** (1.0 / (len(s) - 1)) - 1.0)


def mean_growth(s: AnnualSeries) -> float:
    """Arithmetic mean of the year-on-year growth rates v_t/v_{t-1} - 1."""
    if len(s) < 2:
        raise SeriesTooShort("growth rate needs at least two observations")
    bad = np.flatnonzero(s.values[:-1] <= 0)
    if bad.size:
        raise NonPositiveValue(s.start_year + int(bad[0]), s.name)
    return float(np.mean(s.values[1:] / s.values[:-1] - 1.0))


def growth_rate(s: AnnualSeries, method: str = "geometric") -> float:
    if method == "geometric":
        return cagr(s)
    if method == "arithmetic":
        return mean_growth(s)
    raise InvalidParams(f"unknown growth convention {method!r}")

