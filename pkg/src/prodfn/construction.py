"""Building the estimation dataset from raw inputs.

Capital is extended forward with the perpetual-inventory recursion
``K_t = (1 - delta) K_{t-1} + I_t``; employment gaps between census years are
filled at the constant compound growth rate implied by the two surrounding
benchmarks.
"""

from __future__ import annotations

import decimal
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np

from .errors import (
    DiscontinuousSpan,
    InvalidParams,
    MissingInvestment,
    NonPositiveValue,
    TooFewBenchmarks,
)
from .series import AnnualSeries, Dataset, align

__all__ = [
    "DEFAULT_DEPRECIATION",
    "PerpetualInventoryConfig",
    "BenchmarkTable",
    "extend_capital_stock",
    "capital_from_investment",
    "implied_investment",
    "geometric_interpolate",
    "blank_years",
    "assemble_dataset",
]

DEFAULT_DEPRECIATION = 0.047


@dataclass(frozen=True)
class PerpetualInventoryConfig:
    """Depreciation rate plus the capital stock in a seed year.

    ``seed_year``/``seed_capital`` are only used by
    :func:`capital_from_investment`; :func:`extend_capital_stock` seeds from
    the last observed value of the existing series.
    """

    delta: float = DEFAULT_DEPRECIATION
    seed_year: int | None = None
    seed_capital: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.delta < 1.0:
            raise InvalidParams(f"depreciation rate must lie in [0, 1), got {self.delta}")
        if self.seed_capital is not None and not self.seed_capital > 0:
            raise InvalidParams("seed capital must be positive")


class BenchmarkTable:
    """Census observations ``year -> value`` that may skip years."""

    def __init__(self, observations: Mapping[int, float]):
        obs = {int(y): float(v) for y, v in observations.items()}
        if len(obs) < 2:
            raise TooFewBenchmarks(f"need at least two benchmarks, got {len(obs)}")
        for y, v in obs.items():
            if not (np.isfinite(v) and v > 0):
                raise NonPositiveValue(y, "benchmark")
        self._obs = dict(sorted(obs.items()))

    @property
    def years(self) -> list[int]:
        return list(self._obs)

    @property
    def observations(self) -> dict[int, float]:
        return dict(self._obs)

    def __len__(self) -> int:
        return len(self._obs)

    def __getitem__(self, year: int) -> float:
        return self._obs[year]

    def __repr__(self) -> str:
        return f"BenchmarkTable({len(self)} benchmarks, {self.years[0]}-{self.years[-1]})"

    def subset(self, years: Iterable[int]) -> "BenchmarkTable":
        return BenchmarkTable({y: self._obs[y] for y in years})


def extend_capital_stock(
    existing: AnnualSeries,
    investment: AnnualSeries,
    cfg: PerpetualInventoryConfig = PerpetualInventoryConfig(),
    through: int | None = None,
) -> AnnualSeries:
    """Append perpetual-inventory years after the end of ``existing``.

    Parameters
    ----------
    existing : AnnualSeries
        Observed capital stock; the recursion starts from its last value.
    investment : AnnualSeries
        Fixed-price investment.  Must cover every synthesized year and begin
        no later than the year after ``existing`` ends.
    cfg : PerpetualInventoryConfig
    through : int, optional
        Last year to synthesize.  Defaults to the last investment year.

    Returns
    -------
    AnnualSeries
        ``existing`` followed by the synthesized values, with no hole.
    """
    first_new = existing.end_year + 1
    last_new = investment.end_year if through is None else int(through)
    if last_new < first_new:
        return existing
    if investment.start_year > first_new:
        raise DiscontinuousSpan(
            f"capital ends {existing.end_year} but investment starts {investment.start_year}"
        )
    if last_new > investment.end_year:
        raise MissingInvestment(investment.end_year + 1)
    keep = 1.0 - cfg.delta
    k = float(existing.values[-1])
    new = []
    for year in range(first_new, last_new + 1):
        k = keep * k + investment[year]
        new.append(k)
    return AnnualSeries(existing.name, existing.start_year, np.concatenate([existing.values, new]))


def capital_from_investment(
    investment: AnnualSeries, cfg: PerpetualInventoryConfig, name: str = "K"
) -> AnnualSeries:
    """Run the recursion from ``cfg.seed_capital`` in ``cfg.seed_year``."""
    if cfg.seed_year is None or cfg.seed_capital is None:
        raise InvalidParams("seed_year and seed_capital are required")
    seed = AnnualSeries(name, cfg.seed_year, [cfg.seed_capital])
    return extend_capital_stock(seed, investment, cfg)


def implied_investment(capital: AnnualSeries, delta: float = DEFAULT_DEPRECIATION) -> AnnualSeries:
    """Invert the recursion: I_t = K_t - (1 - delta) K_{t-1}."""
    k = capital.values
    return AnnualSeries("I", capital.start_year + 1, k[1:] - (1.0 - delta) * k[:-1])


def geometric_interpolate(benchmarks: BenchmarkTable, name: str = "L") -> AnnualSeries:
    """Fill the years between benchmarks at a constant compound growth rate.

    Between consecutive benchmarks ``(a, L_a)`` and ``(b, L_b)`` the rate is
    ``m = (L_b / L_a) ** (1 / (b - a)) - 1`` and ``L_t = L_a (1 + m) ** (t - a)``.
    Benchmark years keep their census values exactly.  Nothing is projected
    outside the first..last benchmark range.
    """
    if not isinstance(benchmarks, BenchmarkTable):
        benchmarks = BenchmarkTable(benchmarks)
    years = benchmarks.years
    obs = benchmarks.observations
    out = [obs[years[0]]]
    for a, b in zip(years[:-1], years[1:]):
        la, lb = obs[a], obs[b]
        gap = b - a
        if gap > 1:
            out.extend(_geometric_fill(la, lb, gap))
        out.append(lb)
    return AnnualSeries(name, years[0], out)


def _geometric_fill(la: float, lb: float, gap: int) -> list[float]:
    # evaluated at 40 digits and rounded once, so exact geometric
    # sequences (100, 110, 121, ...) come out exact in double precision
    with decimal.localcontext() as ctx:
        ctx.prec = 40
        base = decimal.Decimal(la)
        ratio = decimal.Decimal(lb) / base
        return [float(base * ratio ** (decimal.Decimal(j) / gap)) for j in range(1, gap)]


def blank_years(s: AnnualSeries, years: Iterable[int]) -> BenchmarkTable:
    """Drop the given years from ``s``, leaving the rest as benchmarks."""
    drop = set(int(y) for y in years)
    return BenchmarkTable({y: v for y, v in s.to_dict().items() if y not in drop})


def assemble_dataset(q: AnnualSeries, l: AnnualSeries, k: AnnualSeries) -> Dataset:
    """Align output, labour and capital into columns ``Q, L, K`` plus trend ``T``."""
    return align([q.renamed("Q"), l.renamed("L"), k.renamed("K")])
