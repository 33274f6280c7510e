"""Least-squares estimation with classical and AR(1) errors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats

from ._linalg import lstsq
from .errors import (
    AllZeroResiduals,
    InsufficientObservations,
    NoConvergence,
    RankDeficient,
    RhoOutOfRange,
    SchemaMismatch,
    SeriesTooShort,
)
from .forms import DesignMatrix, FunctionalForm, ModelSpec, build_design
from .series import AnnualSeries

__all__ = [
    "FitResult",
    "ols",
    "durbin_watson",
    "estimate_ar1",
    "hildreth_lu",
    "predict",
    "fit_model",
]


@dataclass(frozen=True, eq=False)
class FitResult:
    """Estimates and fit statistics for one regression.

    For AR(1) fits the first observation is lost: ``residuals`` are the
    innovations and ``fitted`` the one-step predictions over the adjusted
    sample, while ``structural_fitted``/``structural_residuals`` hold
    ``X b`` and ``y - X b`` over the full sample.  ``r2`` is then measured on
    the untransformed dependent variable and ``r2_transformed`` on the
    quasi-differenced regression.
    """

    method: str
    response_name: str
    names: tuple[str, ...]
    coefficients: dict[str, float]
    std_errors: dict[str, float]
    t_stats: dict[str, float]
    cov: np.ndarray
    residuals: AnnualSeries
    fitted: AnnualSeries
    structural_fitted: AnnualSeries
    structural_residuals: AnnualSeries
    r2: float
    adj_r2: float
    f_stat: float
    f_pvalue: float
    dw: float
    sigma2: float
    ssr: float
    n_effective: int
    k: int
    df_resid: int
    form: FunctionalForm | None = None
    rho: float | None = None
    rho_se: float | None = None
    rho_t: float | None = None
    r2_transformed: float | None = None
    iterations: int = 0
    last_step: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def params(self) -> np.ndarray:
        return np.array([self.coefficients[n] for n in self.names])

    @property
    def pvalues(self) -> dict[str, float]:
        """Two-sided p-values from Student t with ``df_resid`` degrees of freedom."""
        return {n: float(2 * stats.t.sf(abs(t), self.df_resid)) for n, t in self.t_stats.items()}

    @property
    def pvalues_one_sided(self) -> dict[str, float]:
        """P(T > |t|): the one-sided p-value in the direction of the estimate."""
        return {n: float(stats.t.sf(abs(t), self.df_resid)) for n, t in self.t_stats.items()}

    @property
    def rho_pvalue(self) -> float | None:
        if self.rho_t is None or not np.isfinite(self.rho_t):
            return None
        return float(2 * stats.t.sf(abs(self.rho_t), self.df_resid))

    def t_critical(self, alpha: float = 0.05) -> float:
        return float(stats.t.ppf(1 - alpha / 2, self.df_resid))

    def conf_int(self, alpha: float = 0.05) -> dict[str, tuple[float, float]]:
        q = self.t_critical(alpha)
        return {
            n: (self.coefficients[n] - q * self.std_errors[n], self.coefficients[n] + q * self.std_errors[n])
            for n in self.names
        }

    def significant(self, alpha: float = 0.05) -> dict[str, bool]:
        return {n: p < alpha for n, p in self.pvalues.items()}


def durbin_watson(residuals) -> float:
    """sum((e_t - e_{t-1})**2) / sum(e_t**2)"""
    e = residuals.values if isinstance(residuals, AnnualSeries) else np.asarray(residuals, float)
    if e.size < 2:
        raise SeriesTooShort("Durbin-Watson needs at least two residuals")
    denom = float(e @ e)
    if denom == 0.0:
        raise AllZeroResiduals("all residuals are zero")
    d = np.diff(e)
    return float(d @ d) / denom


def _dw_or_nan(e: np.ndarray) -> float:
    try:
        return durbin_watson(e)
    except AllZeroResiduals:
        return float("nan")


def _wald_f(beta: np.ndarray, cov: np.ndarray, names: tuple[str, ...], df_resid: int):
    idx = [j for j, n in enumerate(names) if n != "const"]
    if not idx:
        return float("nan"), float("nan")
    b = beta[idx]
    V = cov[np.ix_(idx, idx)]
    try:
        stat = float(b @ np.linalg.solve(V, b)) / len(idx)
    except np.linalg.LinAlgError:
        return float("nan"), float("nan")
    return stat, float(stats.f.sf(stat, len(idx), df_resid))


def _centered_r2(y: np.ndarray, ssr: float) -> float:
    tss = float(((y - y.mean()) ** 2).sum())
    if tss == 0.0:
        return 0.0
    return min(1.0, max(0.0, 1.0 - ssr / tss))


def _se_and_t(beta, cov):
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = beta / se
    return se, t


def ols(design: DesignMatrix) -> FitResult:
    """Ordinary least squares with the usual homoscedastic covariance.

    ``f_stat`` tests all non-intercept coefficients jointly.
    """
    X, y, names = design.X, design.response, design.names
    n, k = X.shape
    if n <= k:
        raise InsufficientObservations(f"{n} observations for {k} regressors")
    res = lstsq(X, y, names)
    df = n - k
    sigma2 = res.ssr / df
    cov = sigma2 * res.xtx_inv
    se, t = _se_and_t(res.beta, cov)
    # an intercept-only model explains nothing; keep rounding from saying otherwise
    r2 = 0.0 if names == ("const",) else _centered_r2(y, res.ssr)
    adj = min(r2, 1.0 - (1.0 - r2) * (n - 1) / df)
    f, fp = _wald_f(res.beta, cov, names, df)
    fitted = X @ res.beta
    start = design.start_year
    fitted_s = AnnualSeries(f"fitted.{design.response_name}", start, fitted)
    resid_s = AnnualSeries("resid", start, res.resid)
    return FitResult(
        method="ols",
        response_name=design.response_name,
        names=names,
        coefficients=dict(zip(names, map(float, res.beta))),
        std_errors=dict(zip(names, map(float, se))),
        t_stats=dict(zip(names, map(float, t))),
        cov=cov,
        residuals=resid_s,
        fitted=fitted_s,
        structural_fitted=fitted_s,
        structural_residuals=resid_s,
        r2=r2,
        adj_r2=adj,
        f_stat=f,
        f_pvalue=fp,
        dw=_dw_or_nan(res.resid),
        sigma2=sigma2,
        ssr=res.ssr,
        n_effective=n,
        k=k,
        df_resid=df,
        form=design.form,
    )


def _quasi_difference(y, X, rho):
    return y[1:] - rho * y[:-1], X[1:] - rho * X[:-1]


def _negligible(u: np.ndarray, y: np.ndarray) -> bool:
    return math.sqrt(float(u @ u)) <= 1e-12 * max(1.0, math.sqrt(float(y @ y)))


_BRACKET_EVERY = 10
_BRACKET_STEP = 0.002
_RHO_BOUND = 0.9999


def _next_fixed_point(g, rho, rho_new, tol):
    """Root of ``g(r) = f(r) - r`` that plain iteration from ``rho`` heads for.

    Walks from ``rho`` in the direction of travel until ``g`` changes sign,
    then polishes with Brent's method.  ``None`` if no sign change occurs
    before ``|r|`` reaches the stationarity bound.
    """
    direction = 1.0 if rho_new > rho else -1.0
    a, ga = rho, rho_new - rho
    while True:
        b = a + direction * _BRACKET_STEP
        if abs(b) >= _RHO_BOUND:
            return None
        gb = g(b)
        if gb == 0.0:
            return b
        if (gb > 0) != (ga > 0):
            return float(optimize.brentq(g, min(a, b), max(a, b), xtol=tol * 1e-3, rtol=4 * np.finfo(float).eps))
        a, ga = b, gb


def estimate_ar1(
    design: DesignMatrix, tol: float = 1e-8, max_iter: int = 200, accelerate: bool = True
) -> FitResult:
    """Regression with AR(1) errors by iterated Cochrane-Orcutt.

    Alternates between least squares on the quasi-differenced data
    ``y_t - rho y_{t-1}`` / ``x_t - rho x_{t-1}`` (first observation dropped)
    and ``rho = sum(u_t u_{t-1}) / sum(u_{t-1}**2)`` from the structural
    residuals, until ``|delta rho| < tol``.  When the iteration crawls
    (every tenth step without convergence and ``accelerate`` set), the fixed
    point it is heading for is located directly by bracketing and Brent's
    method; the final update must still move rho by less than ``tol``.

    Standard errors come from the joint Gauss-Newton covariance of
    ``(b, rho)`` at the converged point, with ``n - 1 - (k + 1)`` residual
    degrees of freedom.  ``f_stat`` is a Wald test of the non-intercept
    structural coefficients only.
    """
    X, y, names = design.X, design.response, design.names
    n, k = X.shape
    if n < k + 3:
        raise InsufficientObservations(f"AR(1) fit needs at least {k + 3} observations, got {n}")

    def update(rho):
        ys, Xs = _quasi_difference(y, X, rho)
        beta = lstsq(Xs, ys, names).beta
        u = y - X @ beta
        if _negligible(u[:-1], y):
            return beta, 0.0, True
        return beta, float(u[1:] @ u[:-1]) / float(u[:-1] @ u[:-1]), False

    beta = lstsq(X, y, names).beta
    u = y - X @ beta
    degenerate = _negligible(u[:-1], y)
    rho = 0.0 if degenerate else float(u[1:] @ u[:-1]) / float(u[:-1] @ u[:-1])
    step = float("inf")
    prev_step = None
    for it in range(1, max_iter + 1):
        if abs(rho) >= 1.0:
            raise RhoOutOfRange(rho, it)
        beta, rho_new, degenerate = update(rho)
        step = abs(rho_new - rho)
        if degenerate:
            break
        # with contraction factor c the distance to the fixed point is about
        # step * c / (1 - c); a bare step test stops far too early when c ~ 1
        c = min(step / prev_step, 0.999999) if prev_step else 0.0
        if step * max(1.0, c / (1.0 - c)) < tol:
            break
        prev_step = step
        if accelerate and it % _BRACKET_EVERY == 0:
            root = _next_fixed_point(lambda r: update(r)[1] - r, rho, rho_new, tol)
            if root is not None:
                rho, prev_step = root, None
                continue
        rho = rho_new
    else:
        raise NoConvergence(max_iter, step)
    ys, Xs = _quasi_difference(y, X, rho)
    eps = ys - Xs @ beta
    u = y - X @ beta
    m = n - 1
    df = m - k - 1
    ssr = float(eps @ eps)
    sigma2 = ssr / df
    if degenerate:
        cov = sigma2 * lstsq(Xs, ys, names).xtx_inv
        rho_se = float("nan")
    else:
        J = np.column_stack([Xs, u[:-1]])
        try:
            jinv = lstsq(J, eps, list(names) + ["rho"], need_df=False).xtx_inv
        except RankDeficient:
            jinv = np.full((k + 1, k + 1), np.nan)
            jinv[:k, :k] = lstsq(Xs, ys, names).xtx_inv
        full = sigma2 * jinv
        cov = full[:k, :k]
        rho_se = math.sqrt(full[k, k]) if np.isfinite(full[k, k]) and full[k, k] >= 0 else float("nan")
    se, t = _se_and_t(beta, cov)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho_t = float(rho / rho_se) if rho_se and np.isfinite(rho_se) else float("nan")

    y_adj = y[1:]
    r2 = _centered_r2(y_adj, ssr)
    adj = min(r2, 1.0 - (1.0 - r2) * (m - 1) / df)
    r2_tr = _centered_r2(ys, ssr)
    f, fp = _wald_f(beta, cov, names, df)
    start = design.start_year
    return FitResult(
        method="ar1",
        response_name=design.response_name,
        names=names,
        coefficients=dict(zip(names, map(float, beta))),
        std_errors=dict(zip(names, map(float, se))),
        t_stats=dict(zip(names, map(float, t))),
        cov=cov,
        residuals=AnnualSeries("innov", start + 1, eps),
        fitted=AnnualSeries(f"fitted.{design.response_name}", start + 1, y_adj - eps),
        structural_fitted=AnnualSeries(f"xb.{design.response_name}", start, X @ beta),
        structural_residuals=AnnualSeries("u", start, u),
        r2=r2,
        adj_r2=adj,
        f_stat=f,
        f_pvalue=fp,
        dw=_dw_or_nan(eps),
        sigma2=sigma2,
        ssr=ssr,
        n_effective=m,
        k=k,
        df_resid=df,
        form=design.form,
        rho=rho,
        rho_se=rho_se,
        rho_t=rho_t,
        r2_transformed=r2_tr,
        iterations=it,
        last_step=step,
    )


def hildreth_lu(design: DesignMatrix, step: float = 1e-4, bound: float = 0.9999) -> tuple[float, float]:
    """Grid search for the rho minimising the quasi-differenced SSR.

    Returns ``(rho, ssr)``.  Same first-observation convention as
    :func:`estimate_ar1`, so at an interior optimum the two agree up to the
    grid step.
    """
    X, y = design.X, design.response
    grid = np.arange(-bound, bound + step / 2, step)
    best = (float("nan"), float("inf"))
    for r in grid:
        ys, Xs = _quasi_difference(y, X, r)
        beta, *_ = np.linalg.lstsq(Xs, ys, rcond=None)
        e = ys - Xs @ beta
        ssr = float(e @ e)
        if ssr < best[1]:
            best = (float(r), ssr)
    return best


def predict(fit: FitResult, design: DesignMatrix) -> AnnualSeries:
    """Static prediction ``X b`` (no AR term)."""
    if tuple(design.names) != tuple(fit.names):
        raise SchemaMismatch(f"design columns {design.names} do not match fit {fit.names}")
    return AnnualSeries(f"pred.{design.response_name}", design.start_year, design.X @ fit.params)


def fit_model(d, spec) -> tuple[DesignMatrix, FitResult]:
    """Build the design for ``spec`` on dataset ``d`` and fit it.

    ``spec.ar_error_order == 1`` selects :func:`estimate_ar1`, otherwise
    :func:`ols`.
    """
    if not isinstance(spec, ModelSpec):
        spec = ModelSpec(form=FunctionalForm(spec))
    design = build_design(d, spec)
    fit = estimate_ar1(design) if spec.ar_error_order else ols(design)
    return design, fit
