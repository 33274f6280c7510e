"""Functional forms of the production function compiled into regression designs."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import EmptyDataset, InvalidParams, NonPositiveValue, SchemaMismatch
from .series import AnnualSeries, Dataset

__all__ = [
    "FunctionalForm",
    "ModelSpec",
    "DesignMatrix",
    "WAR_YEARS",
    "build_design",
    "war_dummy",
    "ALL_FORMS",
    "column_names",
]

WAR_YEARS = (1980, 1988)


class FunctionalForm(str, Enum):
    CD_UNRESTRICTED = "cd_unrestricted"
    CD_TINBERGEN = "cd_tinbergen"
    CD_RESTRICTED_PERCAPITA = "cd_restricted_percapita"
    CD_RESTRICTED_TINBERGEN_PERCAPITA = "cd_restricted_tinbergen_percapita"
    TRANSCENDENTAL = "transcendental"
    DEBERTIN = "debertin"
    TRANSLOG = "translog"

    def __str__(self) -> str:
        return self.value

    @property
    def is_cobb_douglas(self) -> bool:
        return self.value.startswith("cd_")

    @property
    def is_per_capita(self) -> bool:
        return "percapita" in self.value

    @property
    def has_trend(self) -> bool:
        return "tinbergen" in self.value


ALL_FORMS = tuple(FunctionalForm)

# regressor names in equation order, intercept first
_COLUMNS = {
    FunctionalForm.CD_UNRESTRICTED: ("const", "lnK", "lnL"),
    FunctionalForm.CD_TINBERGEN: ("const", "lnK", "lnL", "T"),
    FunctionalForm.CD_RESTRICTED_PERCAPITA: ("const", "lnK_L"),
    FunctionalForm.CD_RESTRICTED_TINBERGEN_PERCAPITA: ("const", "lnK_L", "T"),
    FunctionalForm.TRANSCENDENTAL: ("const", "L", "lnL", "K", "lnK"),
    FunctionalForm.DEBERTIN: ("const", "lnL", "lnK", "L", "K", "KL"),
    FunctionalForm.TRANSLOG: ("const", "lnL", "lnL2", "lnK", "lnK2", "lnL_lnK"),
}


def column_names(form: FunctionalForm | str, war: bool = False) -> tuple[str, ...]:
    """Regressor names of ``form`` in design order."""
    return _COLUMNS[FunctionalForm(form)] + (("war",) if war else ())


@dataclass(frozen=True)
class ModelSpec:
    form: FunctionalForm = FunctionalForm.CD_TINBERGEN
    include_war_dummy: bool = False
    ar_error_order: int = 0
    war_years: tuple[int, int] = WAR_YEARS

    def __post_init__(self):
        object.__setattr__(self, "form", FunctionalForm(self.form))
        if self.ar_error_order not in (0, 1):
            raise InvalidParams("ar_error_order must be 0 or 1")
        a, b = self.war_years
        if a > b:
            raise InvalidParams(f"war span {a}-{b} is reversed")
        object.__setattr__(self, "war_years", (int(a), int(b)))

    @property
    def label(self) -> str:
        parts = [self.form.value]
        if self.include_war_dummy:
            parts.append("war")
        if self.ar_error_order:
            parts.append("ar1")
        return "+".join(parts)


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Response, named regressor columns (intercept first) and their years."""

    response_name: str
    response: np.ndarray
    names: tuple[str, ...]
    X: np.ndarray
    start_year: int
    form: FunctionalForm | None = None

    def __post_init__(self):
        y = np.array(self.response, dtype=float).reshape(-1)
        X = np.array(self.X, dtype=float)
        if X.ndim != 2 or X.shape[0] != y.size or X.shape[1] != len(self.names):
            raise SchemaMismatch("design shape does not match response/column names")
        if len(set(self.names)) != len(self.names):
            raise SchemaMismatch(f"duplicate column names {self.names}")
        if not self.names or self.names[0] != "const":
            raise SchemaMismatch("intercept column 'const' must come first")
        y.setflags(write=False)
        X.setflags(write=False)
        object.__setattr__(self, "response", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.start_year + self.n)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.X[:, self.names.index(name)]
        except ValueError:
            raise SchemaMismatch(f"design has no column {name!r}") from None

    @property
    def columns(self) -> list[tuple[str, np.ndarray]]:
        return [(nm, self.X[:, j]) for j, nm in enumerate(self.names)]

    def response_series(self) -> AnnualSeries:
        return AnnualSeries(self.response_name, self.start_year, self.response)


def war_dummy(first_year: int, last_year: int, war_years: tuple[int, int] = WAR_YEARS) -> AnnualSeries:
    """0/1 indicator over ``first_year..last_year``; 1 inside ``war_years``."""
    if last_year < first_year:
        raise EmptyDataset(f"empty span {first_year}-{last_year}")
    years = np.arange(first_year, last_year + 1)
    on = (years >= war_years[0]) & (years <= war_years[1])
    return AnnualSeries("war", first_year, on.astype(float))


def _positive(d: Dataset, name: str) -> np.ndarray:
    v = d[name]
    bad = np.flatnonzero(v <= 0)
    if bad.size:
        raise NonPositiveValue(d.start_year + int(bad[0]), name)
    return v


def build_design(d: Dataset, spec: ModelSpec | FunctionalForm | str) -> DesignMatrix:
    """Compile a dataset with columns Q, L, K (and trend T) into a design.

    The regressors are exactly the terms of the chosen form; a war dummy is
    appended last when requested.
    """
    if not isinstance(spec, ModelSpec):
        spec = ModelSpec(form=FunctionalForm(spec))
    if len(d) == 0:
        raise EmptyDataset("dataset has no rows")
    Q, L, K = (_positive(d, c) for c in ("Q", "L", "K"))
    lnQ, lnL, lnK = np.log(Q), np.log(L), np.log(K)
    T = d["T"]
    form = spec.form
    available = {
        "const": np.ones(len(d)),
        "lnK": lnK,
        "lnL": lnL,
        "T": T,
        "lnK_L": lnK - lnL,
        "L": L,
        "K": K,
        "KL": K * L,
        "lnL2": lnL**2,
        "lnK2": lnK**2,
        "lnL_lnK": lnL * lnK,
    }
    names = list(column_names(form))
    cols = [available[n] for n in names]
    if spec.include_war_dummy:
        names.append("war")
        cols.append(war_dummy(d.start_year, d.end_year, spec.war_years).values)
    if form.is_per_capita:
        response_name, response = "lnQ_L", lnQ - lnL
    else:
        response_name, response = "lnQ", lnQ
    return DesignMatrix(response_name, response, tuple(names), np.column_stack(cols), d.start_year, form)
