"""Augmented Dickey-Fuller and Phillips-Perron unit-root tests.

Both tests report a t-ratio type statistic on the lagged level in the
regression of the first difference on deterministics and the lagged level.
Small-sample critical values come from MacKinnon's response surfaces
evaluated at the effective number of observations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import norm

from . import _mackinnon as mk
from ._linalg import lstsq
from .errors import (
    Inconclusive,
    InvalidParams,
    NonPositiveLongRunVariance,
    SeriesTooShort,
    UnsupportedSampleSize,
    ZeroVariance,
)
from .series import AnnualSeries, difference

__all__ = [
    "DETERMINISTICS",
    "UnitRootSpec",
    "UnitRootResult",
    "IntegrationOrder",
    "adf_test",
    "pp_test",
    "unit_root_test",
    "critical_values",
    "mackinnon_pvalue",
    "integration_order",
    "default_max_lags",
    "default_bandwidth",
    "bartlett_long_run_variance",
]

DETERMINISTICS = ("none", "constant", "constant_and_trend")
_TREND_CODE = {"none": "n", "constant": "c", "constant_and_trend": "ct"}
_LEVELS = mk.CV_LEVELS


def default_max_lags(nobs: int) -> int:
    """floor(12 * (n/100)**0.25)"""
    return int(math.floor(12.0 * (nobs / 100.0) ** 0.25))


def default_bandwidth(nobs: int) -> int:
    """floor(4 * (n/100)**(2/9))"""
    return int(math.floor(4.0 * (nobs / 100.0) ** (2.0 / 9.0)))


@dataclass(frozen=True)
class UnitRootSpec:
    """How to run a unit-root test.

    Parameters
    ----------
    deterministics : {"none", "constant", "constant_and_trend"}
    lags : int or None
        Fixed number of lagged differences for ADF.  ``None`` selects the lag
        by information criterion from ``0..max_lags`` on a common sample.
    max_lags : int or None
        Upper bound for automatic selection; ``None`` uses
        :func:`default_max_lags`.
    ic : {"maic", "aic", "bic"}
        Lag-selection criterion.  ``"maic"`` is the modified AIC of Ng and
        Perron computed on OLS-detrended data.
    test_kind : {"adf", "pp"}
    bandwidth : int or None
        Bartlett bandwidth for PP; ``None`` uses :func:`default_bandwidth`.
    alpha : float
        Level at which ``decision`` is taken.
    """

    deterministics: str = "constant_and_trend"
    lags: int | None = None
    max_lags: int | None = None
    ic: str = "maic"
    test_kind: str = "adf"
    bandwidth: int | None = None
    alpha: float = 0.05

    def __post_init__(self):
        if self.deterministics not in DETERMINISTICS:
            raise InvalidParams(f"unknown deterministics {self.deterministics!r}")
        if self.lags is not None and self.lags < 0:
            raise InvalidParams("lags must be >= 0")
        if self.max_lags is not None and self.max_lags < 0:
            raise InvalidParams("max_lags must be >= 0")
        if self.bandwidth is not None and self.bandwidth < 0:
            raise InvalidParams("bandwidth must be >= 0")
        if self.ic not in ("maic", "aic", "bic"):
            raise InvalidParams(f"unknown information criterion {self.ic!r}")
        if self.test_kind not in ("adf", "pp"):
            raise InvalidParams(f"unknown test kind {self.test_kind!r}")
        if self.alpha not in _LEVELS:
            raise InvalidParams(f"alpha must be one of {_LEVELS}")

    def with_(self, **changes) -> "UnitRootSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class UnitRootResult:
    """Outcome of one unit-root test.

    ``decision`` and ``reject_at`` are derived from ``statistic`` and the
    stored critical values; nothing else feeds them.
    """

    test_kind: str
    statistic: float
    cv1: float
    cv5: float
    cv10: float
    lags: int
    n_effective: int
    deterministics: str
    pvalue: float
    alpha: float = 0.05
    critical_family: str = "dickey_fuller"
    series_name: str = ""
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def critical(self) -> dict[float, float]:
        return {0.01: self.cv1, 0.05: self.cv5, 0.10: self.cv10}

    @property
    def reject_at(self) -> float | None:
        """Smallest conventional level at which the unit root is rejected."""
        for level in _LEVELS:
            if self.statistic < self.critical[level]:
                return level
        return None

    @property
    def rejects(self) -> bool:
        return self.statistic < self.critical[self.alpha]

    @property
    def decision(self) -> str:
        return "stationary" if self.rejects else "unit-root"

    @property
    def bandwidth(self) -> int:
        return self.lags

    def to_dict(self) -> dict:
        return {
            "test": self.test_kind,
            "series": self.series_name,
            "statistic": self.statistic,
            "pvalue": self.pvalue,
            "cv1": self.cv1,
            "cv5": self.cv5,
            "cv10": self.cv10,
            ("lags" if self.test_kind == "adf" else "bandwidth"): self.lags,
            "n_effective": self.n_effective,
            "deterministics": self.deterministics,
            "critical_family": self.critical_family,
            "alpha": self.alpha,
            "reject_at": self.reject_at,
            "decision": self.decision,
        }


def critical_values(
    n_effective: int, deterministics: str = "constant_and_trend", n_variables: int = 1
) -> tuple[float, float, float]:
    """Finite-sample 1%, 5% and 10% critical values.

    ``n_variables`` > 1 gives Engle-Granger residual-test values for a
    cointegrating regression in that many I(1) variables; ``deterministics``
    then describes the cointegrating regression.
    """
    if n_effective < 10:
        raise UnsupportedSampleSize(f"critical values need n >= 10, got {n_effective}")
    code = _TREND_CODE[deterministics]
    table = mk.TAU_2010[code]
    if not 1 <= n_variables <= len(table):
        raise UnsupportedSampleSize(
            f"no {deterministics} critical values for {n_variables} variables"
        )
    inv = 1.0 / n_effective
    powers = np.array([1.0, inv, inv**2, inv**3])
    cv = np.asarray(table[n_variables - 1]) @ powers
    return float(cv[0]), float(cv[1]), float(cv[2])


def mackinnon_pvalue(stat: float, deterministics: str = "constant_and_trend", n_variables: int = 1) -> float:
    """Asymptotic left-tail p-value from MacKinnon's (1994) surfaces."""
    code = _TREND_CODE[deterministics]
    i = n_variables - 1
    if stat > mk.TAU_MAX[code][i]:
        return 1.0
    if stat < mk.TAU_MIN[code][i]:
        return 0.0
    coef = mk.TAU_SMALLP[code][i] if stat <= mk.TAU_STAR[code][i] else mk.TAU_LARGEP[code][i]
    return float(norm.cdf(np.polynomial.polynomial.polyval(stat, coef)))


def _deterministic_block(nobs: int, deterministics: str) -> np.ndarray:
    if deterministics == "none":
        return np.empty((nobs, 0))
    if deterministics == "constant":
        return np.ones((nobs, 1))
    return np.column_stack([np.ones(nobs), np.arange(1, nobs + 1, dtype=float)])


def _adf_design(y: np.ndarray, p: int, deterministics: str, drop: int | None = None):
    """Response and regressors for an ADF regression with ``p`` lags.

    Column 0 is the lagged level.  ``drop`` fixes the number of leading
    differences discarded (for a common sample across lag orders).
    """
    dy = np.diff(y)
    start = p if drop is None else drop
    nobs = dy.size - start
    cols = [y[start : start + nobs]]
    for j in range(1, p + 1):
        cols.append(dy[start - j : start - j + nobs])
    X = np.column_stack(cols + [_deterministic_block(nobs, deterministics)])
    return dy[start:], X


def _n_det(deterministics: str) -> int:
    return {"none": 0, "constant": 1, "constant_and_trend": 2}[deterministics]


def _check_length(n: int, p: int, deterministics: str):
    nobs = n - 1 - p
    k = 1 + p + _n_det(deterministics)
    if nobs < k + 2:
        raise SeriesTooShort(
            f"{n} observations leave {nobs} for a regression with {k} regressors"
        )


def _nonzero_ssr(ssr: float, dy: np.ndarray) -> float:
    # an exact fit (constant or deterministic series) leaves nothing to test
    if not ssr > 1e-24 * dy.size * max(float(np.max(dy * dy)), 1e-300):
        raise ZeroVariance("the test regression fits exactly; the series has no stochastic component")
    return ssr


def _tstat(y, X):
    fit = lstsq(X, y)
    _nonzero_ssr(fit.ssr, y)
    dof = X.shape[0] - X.shape[1]
    s2 = fit.ssr / dof
    se = math.sqrt(s2 * fit.xtx_inv[0, 0])
    return fit.beta[0] / se, se, fit


def _detrended(y: np.ndarray, deterministics: str) -> np.ndarray:
    D = _deterministic_block(y.size, deterministics)
    if D.shape[1] == 0:
        return y
    return lstsq(D, y, need_df=False).resid


def _select_lag(y: np.ndarray, spec: UnitRootSpec) -> tuple[int, dict[int, float]]:
    n = y.size
    max_p = default_max_lags(n) if spec.max_lags is None else spec.max_lags
    ndet = _n_det(spec.deterministics)
    while max_p > 0 and (n - 1 - max_p) < (1 + max_p + ndet) + 2:
        max_p -= 1
    _check_length(n, max_p, spec.deterministics)
    crit = {}
    if spec.ic == "maic":
        # modified AIC on OLS-detrended data; the penalty grows with the
        # evidence against the unit root, which keeps the pre-test from
        # inflating the size of the final test
        yd = _detrended(y, spec.deterministics)
        for p in range(max_p + 1):
            dy, X = _adf_design(yd, p, "none", drop=max_p)
            fit = lstsq(X, dy)
            nobs = dy.size
            s2 = _nonzero_ssr(fit.ssr, dy) / nobs
            tau = fit.beta[0] ** 2 * float(X[:, 0] @ X[:, 0]) / s2
            crit[p] = math.log(s2) + 2.0 * (tau + p) / nobs
    else:
        for p in range(max_p + 1):
            dy, X = _adf_design(y, p, spec.deterministics, drop=max_p)
            ssr = _nonzero_ssr(lstsq(X, dy).ssr, dy)
            nobs, k = X.shape
            penalty = 2.0 * k if spec.ic == "aic" else k * math.log(nobs)
            crit[p] = nobs * math.log(ssr / nobs) + penalty
    best = min(crit, key=lambda p: (crit[p], p))
    return best, crit


def _values(s, deterministics: str) -> tuple[np.ndarray, str]:
    if isinstance(s, AnnualSeries):
        y, name = s.values, s.name
    else:
        y, name = np.asarray(s, dtype=float).reshape(-1), ""
    _check_length(y.size, 0, deterministics)
    if y.size > _n_det(deterministics):
        yd = _detrended(y, deterministics)
        if not float(yd @ yd) > 1e-24 * max(float(y @ y), 1e-300):
            raise ZeroVariance(f"series {name!r} is exactly {deterministics.replace('_', ' ')}; nothing to test")
    return y, name


def adf_test(s: AnnualSeries, spec: UnitRootSpec = UnitRootSpec()) -> UnitRootResult:
    """Augmented Dickey-Fuller test.

    Regresses the first difference on the deterministic terms, the lagged
    level and ``p`` lagged differences; the statistic is the t-ratio on the
    lagged level.  With automatic lag choice, every order ``0..max_lags`` is
    fitted on the same trimmed sample, the minimum-criterion order is kept,
    and the final regression is re-run on the full sample for that order.
    """
    y, name = _values(s, spec.deterministics)
    extra = {}
    if spec.lags is None:
        p, crit = _select_lag(y, spec)
        extra["ic"] = {int(k): float(v) for k, v in crit.items()}
    else:
        p = spec.lags
    _check_length(y.size, p, spec.deterministics)
    dy, X = _adf_design(y, p, spec.deterministics)
    stat, _, fit = _tstat(dy, X)
    nobs = dy.size
    cv = critical_values(nobs, spec.deterministics)
    return UnitRootResult(
        "adf", float(stat), *cv, lags=p, n_effective=nobs,
        deterministics=spec.deterministics,
        pvalue=mackinnon_pvalue(stat, spec.deterministics),
        alpha=spec.alpha, series_name=name, extra=extra,
    )


def bartlett_long_run_variance(resid: np.ndarray, bandwidth: int) -> tuple[float, float]:
    """Return ``(gamma0, lambda2)`` with Bartlett weights 1 - j/(bandwidth+1)."""
    e = np.asarray(resid, dtype=float)
    n = e.size
    gamma0 = float(e @ e) / n
    lam2 = gamma0
    for j in range(1, min(bandwidth, n - 1) + 1):
        w = 1.0 - j / (bandwidth + 1.0)
        lam2 += 2.0 * w * float(e[j:] @ e[:-j]) / n
    return gamma0, lam2


def pp_test(s: AnnualSeries, spec: UnitRootSpec = UnitRootSpec(test_kind="pp")) -> UnitRootResult:
    """Phillips-Perron Z_t test.

    Corrects the Dickey-Fuller t-ratio from the no-lag regression for serial
    correlation using a Bartlett-kernel long-run variance of its residuals::

        Z_t = sqrt(g0/l2) t - (l2 - g0) / (2 sqrt(l2)) * T se / s

    where ``g0`` is the residual variance, ``l2`` the long-run variance,
    ``T`` the effective sample, ``se`` the standard error of the lagged-level
    coefficient and ``s`` the regression standard error.
    """
    y, name = _values(s, spec.deterministics)
    _check_length(y.size, 0, spec.deterministics)
    dy, X = _adf_design(y, 0, spec.deterministics)
    nobs = dy.size
    bw = default_bandwidth(nobs) if spec.bandwidth is None else spec.bandwidth
    t, se, fit = _tstat(dy, X)
    gamma0, lam2 = bartlett_long_run_variance(fit.resid, bw)
    if not lam2 > 0:
        raise NonPositiveLongRunVariance(f"long-run variance {lam2:.3g} with bandwidth {bw}")
    s = math.sqrt(fit.ssr / (nobs - X.shape[1]))
    lam = math.sqrt(lam2)
    stat = math.sqrt(gamma0 / lam2) * t - 0.5 * (lam2 - gamma0) / lam * (nobs * se / s)
    cv = critical_values(nobs, spec.deterministics)
    return UnitRootResult(
        "pp", float(stat), *cv, lags=bw, n_effective=nobs,
        deterministics=spec.deterministics,
        pvalue=mackinnon_pvalue(stat, spec.deterministics),
        alpha=spec.alpha, series_name=name,
        extra={"df_tstat": float(t), "gamma0": gamma0, "lambda2": lam2},
    )


def unit_root_test(s: AnnualSeries, spec: UnitRootSpec = UnitRootSpec()) -> UnitRootResult:
    """Dispatch on ``spec.test_kind``."""
    return adf_test(s, spec) if spec.test_kind == "adf" else pp_test(s, spec)


@dataclass(frozen=True)
class IntegrationOrder:
    order: int
    trail: tuple[UnitRootResult, ...]

    def __int__(self) -> int:
        return self.order


def integration_order(
    s: AnnualSeries, spec: UnitRootSpec = UnitRootSpec(), max_d: int = 2
) -> IntegrationOrder:
    """Smallest d <= max_d at which the d-th difference is found stationary.

    Levels are tested first, then successive differences, at ``spec.alpha``.
    The full sequence of test results is kept in ``trail``.
    """
    trail = []
    current = s if isinstance(s, AnnualSeries) else AnnualSeries("y", 0, s)
    for d in range(max_d + 1):
        if d:
            current = difference(current)
        res = unit_root_test(current, spec)
        trail.append(res)
        if res.rejects:
            return IntegrationOrder(d, tuple(trail))
    err = Inconclusive(f"no stationarity found up to order {max_d}")
    err.trail = tuple(trail)
    raise err
