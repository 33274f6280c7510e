"""Residual diagnostics for a fitted production function.

Every test takes the fit together with the design it was estimated on and
leaves both untouched.  For AR(1) fits the residuals are the innovations over
the adjusted sample, so auxiliary regressions use the Gauss-Newton
regressors ``x_t - rho x_{t-1}`` and ``u_{t-1}`` (serial correlation) or the
untransformed regressors over the same years (heteroscedasticity,
residual-regressor correlation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from ._linalg import lstsq
from .errors import InvalidParams, ProdFnError, SchemaMismatch, SeriesTooShort, ZeroVariance
from .estimation import FitResult
from .forms import DesignMatrix
from .series import AnnualSeries

__all__ = [
    "TestRecord",
    "JarqueBeraResult",
    "AcfRow",
    "CollinearityReport",
    "DiagnosticsReport",
    "breusch_godfrey",
    "breusch_pagan_godfrey",
    "jarque_bera",
    "mean_residual",
    "acf_pacf",
    "residual_regressor_correlation",
    "collinearity_screen",
    "run_diagnostics",
]

DEFAULT_BG_LAGS = 2


@dataclass(frozen=True)
class TestRecord:
    """An LM-type statistic with its chi-square reference distribution."""

    name: str
    statistic: float
    df: int
    pvalue: float
    lags: Optional[int] = None
    variant: str = ""

    def rejects(self, alpha: float = 0.05) -> bool:
        return self.pvalue < alpha

    def to_dict(self) -> dict:
        d = {"test": self.name, "statistic": self.statistic, "df": self.df, "pvalue": self.pvalue}
        if self.lags is not None:
            d["lags"] = self.lags
        if self.variant:
            d["variant"] = self.variant
        return d


@dataclass(frozen=True)
class JarqueBeraResult:
    statistic: float
    pvalue: float
    skewness: float
    excess_kurtosis: float
    n: int

    @property
    def kurtosis(self) -> float:
        return self.excess_kurtosis + 3.0

    def rejects(self, alpha: float = 0.05) -> bool:
        return self.pvalue < alpha

    def to_dict(self) -> dict:
        return {
            "test": "jarque_bera",
            "statistic": self.statistic,
            "df": 2,
            "pvalue": self.pvalue,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
        }


@dataclass(frozen=True)
class AcfRow:
    lag: int
    acf: float
    pacf: float
    band: float

    @property
    def outside(self) -> bool:
        return self.lag > 0 and abs(self.acf) > self.band


@dataclass(frozen=True, eq=False)
class CollinearityReport:
    names: tuple[str, ...]
    corr: np.ndarray
    vif: dict[str, float]
    condition_number: float
    flag_high_r2_few_t: bool
    flag_high_corr: bool
    significant: int = 0

    @property
    def flagged(self) -> bool:
        return self.flag_high_r2_few_t or self.flag_high_corr

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "corr": [[float(v) for v in row] for row in self.corr],
            "vif": dict(self.vif),
            "condition_number": self.condition_number,
            "flag_high_r2_few_t": self.flag_high_r2_few_t,
            "flag_high_corr": self.flag_high_corr,
        }


@dataclass(frozen=True, eq=False)
class DiagnosticsReport:
    """Outcome of the full battery; a component that could not be computed
    is ``None`` and its error message is kept in ``errors``."""

    bg: Optional[TestRecord]
    bpg: Optional[TestRecord]
    jb: Optional[JarqueBeraResult]
    mean_residual: float
    acf: list[AcfRow]
    resid_regressor_corr: dict[str, float]
    collinearity: Optional[CollinearityReport]
    errors: dict[str, str] = field(default_factory=dict)


# -- helpers -------------------------------------------------------------------


def _check_pair(fit: FitResult, design: DesignMatrix):
    if tuple(fit.names) != tuple(design.names):
        raise SchemaMismatch(f"fit columns {fit.names} do not match design {design.names}")
    lost = 1 if fit.method == "ar1" else 0
    if fit.n_effective != design.n - lost or fit.residuals.start_year != design.start_year + lost:
        raise SchemaMismatch("fit and design cover different years")
    return lost


def _untransformed(fit: FitResult, design: DesignMatrix) -> np.ndarray:
    lost = _check_pair(fit, design)
    return design.X[lost:]


def _gauss_newton_regressors(fit: FitResult, design: DesignMatrix) -> np.ndarray:
    lost = _check_pair(fit, design)
    if not lost:
        return design.X
    X, rho = design.X, fit.rho or 0.0
    Z = X[1:] - rho * X[:-1]
    u_lag = fit.structural_residuals.values[:-1]
    if math.sqrt(float(u_lag @ u_lag)) > 1e-12 * max(1.0, float(np.abs(design.response).max())):
        Z = np.column_stack([Z, u_lag])
    return Z


def _r2(y: np.ndarray, Z: np.ndarray, names=None) -> float:
    res = lstsq(Z, y, names)
    tss = float(((y - y.mean()) ** 2).sum())
    # a response constant up to rounding has nothing to explain
    if tss <= 1e-24 * y.size * float(np.max(y * y)):
        return 0.0
    return min(1.0, max(0.0, 1.0 - res.ssr / tss))


def _chi2_sf(x: float, df: int) -> float:
    return float(stats.chi2.sf(x, df))


def _resid(s) -> np.ndarray:
    if isinstance(s, FitResult):
        s = s.residuals
    if isinstance(s, AnnualSeries):
        return np.asarray(s.values, dtype=float)
    return np.asarray(s, dtype=float).reshape(-1)


# -- tests ---------------------------------------------------------------------


def breusch_godfrey(fit: FitResult, design: DesignMatrix, p: int = DEFAULT_BG_LAGS) -> TestRecord:
    """Breusch-Godfrey LM test for serial correlation up to order ``p``.

    The residuals are regressed on the model regressors and ``p`` of their
    own lags (pre-sample lags set to zero); ``LM = n R^2`` is referred to a
    chi-square with ``p`` degrees of freedom.
    """
    if p < 1:
        raise InvalidParams("lag order must be positive")
    e = _resid(fit)
    Z = _gauss_newton_regressors(fit, design)
    n = e.size
    if n <= Z.shape[1] + p:
        raise SeriesTooShort(f"{n} residuals cannot support {Z.shape[1]} regressors and {p} lags")
    lags = np.zeros((n, p))
    for j in range(1, p + 1):
        lags[j:, j - 1] = e[:-j]
    lm = n * _r2(e, np.column_stack([Z, lags]))
    return TestRecord("breusch_godfrey", lm, p, _chi2_sf(lm, p), lags=p)


def breusch_pagan_godfrey(fit: FitResult, design: DesignMatrix, variant: str = "nr2") -> TestRecord:
    """Breusch-Pagan-Godfrey heteroscedasticity test.

    Squared residuals are regressed on the model regressors.  ``variant="nr2"``
    reports ``n R^2``; ``variant="scaled_ess"`` reports the explained sum of
    squares over ``2 sigma^4``, the form that assumes normal errors.  Both
    use ``k - 1`` degrees of freedom.
    """
    if variant not in ("nr2", "scaled_ess"):
        raise InvalidParams(f"unknown variant {variant!r}")
    e = _resid(fit)
    X = _untransformed(fit, design)
    n, k = X.shape
    if n <= k:
        raise SeriesTooShort(f"{n} residuals for {k} regressors")
    df = k - 1
    e2 = e * e
    if variant == "nr2":
        stat = n * _r2(e2, X, design.names)
    else:
        s2 = float(e2.mean())
        if s2 == 0.0:
            raise ZeroVariance("all residuals are zero")
        g = e2 / s2
        fitted = g - lstsq(X, g, design.names).resid
        stat = 0.5 * float(((fitted - g.mean()) ** 2).sum())
    return TestRecord("breusch_pagan_godfrey", stat, df, _chi2_sf(stat, df) if df else 1.0, variant=variant)


def jarque_bera(residuals) -> JarqueBeraResult:
    """Jarque-Bera normality test from the biased sample moments.

    >>> round(jarque_bera([1, -1, 1, -1, 1, -1]).statistic, 12)
    1.0
    """
    x = _resid(residuals)
    n = x.size
    if n < 4:
        raise SeriesTooShort("Jarque-Bera needs at least four observations")
    d = x - x.mean()
    m2 = float((d * d).mean())
    if m2 == 0.0:
        raise ZeroVariance("residuals have zero variance")
    m3 = float((d**3).mean())
    m4 = float((d**4).mean())
    s = m3 / m2**1.5
    k = m4 / m2**2
    jb = n / 6.0 * (s * s + (k - 3.0) ** 2 / 4.0)
    return JarqueBeraResult(jb, _chi2_sf(jb, 2), s, k - 3.0, n)


def mean_residual(fit) -> float:
    return float(_resid(fit).mean())


def acf_pacf(residuals, max_lag: int) -> list[AcfRow]:
    """Sample autocorrelations and partial autocorrelations for lags 0..max_lag.

    Partial autocorrelations come from the Durbin-Levinson recursion; the
    band is the usual ``1.96 / sqrt(n)``.
    """
    x = _resid(residuals)
    n = x.size
    if max_lag < 1 or max_lag >= n / 2:
        raise SeriesTooShort(f"max_lag must lie in [1, {n / 2}) for {n} observations")
    d = x - x.mean()
    c0 = float(d @ d) / n
    if c0 == 0.0:
        raise ZeroVariance("series has zero variance")
    r = np.array([1.0] + [float(d[h:] @ d[:-h]) / n / c0 for h in range(1, max_lag + 1)])
    pacf = np.empty(max_lag + 1)
    pacf[0] = 1.0
    phi = np.zeros(0)
    for h in range(1, max_lag + 1):
        num = r[h] - float(phi @ r[h - 1 : 0 : -1]) if h > 1 else r[1]
        den = 1.0 - float(phi @ r[1:h]) if h > 1 else 1.0
        a = num / den
        phi = np.append(phi - a * phi[::-1], a)
        pacf[h] = a
    band = 1.96 / math.sqrt(n)
    return [AcfRow(h, float(r[h]), float(pacf[h]), band) for h in range(max_lag + 1)]


def residual_regressor_correlation(fit: FitResult, design: DesignMatrix) -> dict[str, float]:
    """Pearson correlation of the residuals with each non-intercept regressor."""
    e = _resid(fit)
    X = _untransformed(fit, design)
    out = {}
    for j, name in enumerate(design.names):
        if name == "const":
            continue
        x = X[:, j]
        if np.ptp(x) == 0.0 or np.ptp(e) == 0.0:
            out[name] = float("nan")
            continue
        a, b = x - x.mean(), e - e.mean()
        out[name] = float(a @ b) / math.sqrt(float(a @ a) * float(b @ b))
    return out


def collinearity_screen(design: DesignMatrix, fit: FitResult | None = None, alpha: float = 0.05) -> CollinearityReport:
    """Pairwise correlations, variance inflation factors and rule-of-thumb flags.

    Flag A is set when ``r2 > 0.9`` while fewer than half of the slope
    t-statistics clear the two-sided ``alpha`` critical value; flag B when
    any pair of regressors has ``|corr| > 0.9``.  The condition number is
    that of the design with columns scaled to unit length.
    """
    names = tuple(n for n in design.names if n != "const")
    if not names:
        raise SchemaMismatch("collinearity screen needs at least one regressor besides the intercept")
    lstsq(design.X, design.response, design.names)
    idx = [design.names.index(n) for n in names]
    Z = design.X[:, idx]
    if Z.shape[1] == 1:
        corr = np.ones((1, 1))
    else:
        corr = np.corrcoef(Z, rowvar=False)
    vif = {}
    ones = np.ones((design.n, 1))
    for j, name in enumerate(names):
        others = np.column_stack([ones, np.delete(Z, j, axis=1)])
        r2 = _r2(Z[:, j], others)
        vif[name] = math.inf if r2 >= 1.0 else 1.0 / (1.0 - r2)
    s = np.linalg.svd(design.X / np.linalg.norm(design.X, axis=0), compute_uv=False)
    cond = float(s[0] / s[-1])
    off = np.abs(corr[~np.eye(len(names), dtype=bool)])
    flag_b = bool(off.size and off.max() > 0.9)
    flag_a = False
    n_sig = 0
    if fit is not None:
        q = fit.t_critical(alpha)
        n_sig = sum(abs(fit.t_stats[n]) > q for n in names)
        flag_a = bool(fit.r2 > 0.9 and n_sig < len(names) / 2)
    return CollinearityReport(names, corr, vif, cond, flag_a, flag_b, int(n_sig))


def run_diagnostics(
    fit: FitResult,
    design: DesignMatrix,
    bg_lags: int = DEFAULT_BG_LAGS,
    acf_lags: int | None = None,
    bpg_variant: str = "nr2",
) -> DiagnosticsReport:
    """Run the whole battery, recording (not raising) per-test failures."""
    _check_pair(fit, design)
    errors: dict[str, str] = {}

    def attempt(key, func, *args, **kw):
        try:
            return func(*args, **kw)
        except ProdFnError as exc:
            errors[key] = f"{type(exc).__name__}: {exc}"
            return None

    n = fit.n_effective
    if acf_lags is None:
        acf_lags = max(1, min(12, (n - 1) // 2))
    return DiagnosticsReport(
        bg=attempt("bg", breusch_godfrey, fit, design, bg_lags),
        bpg=attempt("bpg", breusch_pagan_godfrey, fit, design, bpg_variant),
        jb=attempt("jb", jarque_bera, fit),
        mean_residual=mean_residual(fit),
        acf=attempt("acf", acf_pacf, fit, acf_lags) or [],
        resid_regressor_corr=residual_regressor_correlation(fit, design),
        collinearity=attempt("collinearity", collinearity_screen, design, fit),
        errors=errors,
    )
