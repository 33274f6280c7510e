"""End-to-end analysis: data, growth, unit roots, model choice, estimation,
diagnostics, cointegration and economic interpretation.

Each stage has its own function returning a plain, JSON-ready dictionary, so
the command-line tool can run stages separately and the full run is just the
stages in sequence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .analysis import (
    ReplicationParams,
    ScanWeights,
    elasticities,
    engle_granger,
    generate_replication_dataset,
    model_selection_scan,
    regularity_check,
    returns_to_scale,
    technical_change,
)
from .construction import PerpetualInventoryConfig
from .dataio import construct_dataset, load_dataset_csv
from .diagnostics import DiagnosticsReport, run_diagnostics
from .errors import InvalidParams, ProdFnError, ReportIOError
from .estimation import FitResult, fit_model
from .forms import ALL_FORMS, DesignMatrix, FunctionalForm, ModelSpec
from .series import AnnualSeries, Dataset, cagr, difference, mean_growth
from .unitroot import UnitRootSpec, adf_test, critical_values, pp_test

__all__ = [
    "PipelineConfig",
    "ReportBundle",
    "run_pipeline",
    "load_data",
    "growth_section",
    "unit_root_section",
    "scan_section",
    "estimation_section",
    "diagnostics_section",
    "cointegration_section",
    "economics_section",
    "clean",
]

ALPHAS = (0.01, 0.05, 0.10)


def clean(obj: Any) -> Any:
    """Convert to plain JSON types; non-finite floats become ``None``."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return clean(obj.to_dict())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


# -- configuration -------------------------------------------------------------


def _model_spec(entry, ar1: bool, war: bool) -> ModelSpec:
    if isinstance(entry, ModelSpec):
        return entry
    if isinstance(entry, str):
        entry = {"form": entry}
    if not isinstance(entry, dict) or "form" not in entry:
        raise InvalidParams(f"model entry {entry!r} needs a 'form'")
    unknown = set(entry) - {"form", "war", "ar1"}
    if unknown:
        raise InvalidParams(f"unknown model keys {sorted(unknown)}")
    try:
        form = FunctionalForm(entry["form"])
    except ValueError:
        raise InvalidParams(f"unknown functional form {entry['form']!r}") from None
    return ModelSpec(form, bool(entry.get("war", war)), int(bool(entry.get("ar1", ar1))))


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a run needs.

    ``data`` is a CSV path; when it is ``None`` a replication dataset is
    drawn with ``seed`` and the ``replication`` overrides.  ``form`` names
    the model carried through estimation and later stages; ``None`` takes
    the top row of the model scan.
    """

    data: Optional[str] = None
    seed: int = 0
    replication: dict = field(default_factory=dict)
    gap_years: tuple[int, ...] = ()
    delta: float = PerpetualInventoryConfig().delta
    unit_root: UnitRootSpec = UnitRootSpec()
    models: tuple[ModelSpec, ...] = tuple(ModelSpec(f, ar_error_order=1) for f in ALL_FORMS)
    form: Optional[str] = FunctionalForm.CD_TINBERGEN.value
    war_dummy: bool = False
    ar1: bool = True
    alpha: float = 0.05
    bg_lags: int = 2
    critical_family: str = "engle_granger"
    eg_residuals: str = "fit"
    eg_ic: str = "aic"
    growth_method: str = "geometric"
    weights: ScanWeights = ScanWeights()
    out: str = "report"
    formats: str = "both"
    threads: int = 1

    def __post_init__(self):
        if self.alpha not in ALPHAS:
            raise InvalidParams(f"alpha must be one of {ALPHAS}, got {self.alpha}")
        if not self.models:
            raise InvalidParams("at least one model spec is required")
        if self.form is not None:
            try:
                FunctionalForm(self.form)
            except ValueError:
                raise InvalidParams(f"unknown functional form {self.form!r}") from None
        if self.formats not in ("text", "structured", "both"):
            raise InvalidParams(f"format must be text, structured or both, got {self.formats!r}")
        if self.growth_method not in ("geometric", "arithmetic"):
            raise InvalidParams(f"unknown growth method {self.growth_method!r}")
        if self.critical_family not in ("engle_granger", "dickey_fuller"):
            raise InvalidParams(f"unknown critical family {self.critical_family!r}")
        if self.eg_residuals not in ("fit", "structural"):
            raise InvalidParams(f"unknown residual choice {self.eg_residuals!r}")
        if self.eg_ic not in ("maic", "aic", "bic"):
            raise InvalidParams(f"unknown information criterion {self.eg_ic!r}")
        if self.bg_lags < 1 or self.threads < 1:
            raise InvalidParams("bg_lags and threads must be positive")
        if not 0.0 <= self.delta < 1.0:
            raise InvalidParams("delta must lie in [0, 1)")
        try:
            ReplicationParams(**self.replication)
        except TypeError as exc:
            raise InvalidParams(f"bad replication settings: {exc}") from None
        object.__setattr__(self, "gap_years", tuple(int(y) for y in self.gap_years))
        object.__setattr__(self, "models", tuple(_model_spec(m, self.ar1, self.war_dummy) for m in self.models))

    @property
    def spec(self) -> Optional[ModelSpec]:
        if self.form is None:
            return None
        return ModelSpec(FunctionalForm(self.form), self.war_dummy, int(self.ar1))

    def with_(self, **changes) -> "PipelineConfig":
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, raw: dict, base_dir: str | Path | None = None) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise InvalidParams(f"unknown configuration keys {sorted(unknown)}")
        kw = dict(raw)
        ar1 = bool(kw.get("ar1", True))
        war = bool(kw.get("war_dummy", False))
        if "unit_root" in kw and not isinstance(kw["unit_root"], UnitRootSpec):
            try:
                kw["unit_root"] = UnitRootSpec(**kw["unit_root"])
            except TypeError as exc:
                raise InvalidParams(f"bad unit_root settings: {exc}") from None
        if "weights" in kw and not isinstance(kw["weights"], ScanWeights):
            try:
                kw["weights"] = ScanWeights(**kw["weights"])
            except TypeError as exc:
                raise InvalidParams(f"bad weights: {exc}") from None
        if "models" in kw:
            if not isinstance(kw["models"], (list, tuple)):
                raise InvalidParams("models must be a list")
            kw["models"] = tuple(_model_spec(m, ar1, war) for m in kw["models"])
        else:
            kw["models"] = tuple(ModelSpec(f, war, int(ar1)) for f in ALL_FORMS)
        if kw.get("data") is not None and base_dir is not None:
            p = Path(kw["data"])
            kw["data"] = str(p if p.is_absolute() else Path(base_dir) / p)
        return cls(**kw)

    @classmethod
    def from_json(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ReportIOError(f"cannot read config {path}: {exc}") from exc
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidParams(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise InvalidParams("config must be a JSON object")
        return cls.from_dict(raw, path.parent)

    def to_dict(self) -> dict:
        return {
            "data": self.data,
            "seed": self.seed,
            "replication": dict(self.replication),
            "gap_years": list(self.gap_years),
            "delta": self.delta,
            "unit_root": {
                "deterministics": self.unit_root.deterministics,
                "lags": self.unit_root.lags,
                "max_lags": self.unit_root.max_lags,
                "ic": self.unit_root.ic,
                "bandwidth": self.unit_root.bandwidth,
            },
            "models": [
                {"form": m.form.value, "war": m.include_war_dummy, "ar1": bool(m.ar_error_order)}
                for m in self.models
            ],
            "form": self.form,
            "war_dummy": self.war_dummy,
            "ar1": self.ar1,
            "alpha": self.alpha,
            "bg_lags": self.bg_lags,
            "critical_family": self.critical_family,
            "eg_ic": self.eg_ic,
            "eg_residuals": self.eg_residuals,
            "growth_method": self.growth_method,
            "weights": {
                "theory": self.weights.theory,
                "significance": self.weights.significance,
                "diagnostics": self.weights.diagnostics,
                "fit": self.weights.fit,
            },
        }


# -- stages ----------------------------------------------------------------------


def load_data(cfg: PipelineConfig) -> tuple[Dataset, dict]:
    """Dataset and a description of where it came from."""
    if cfg.data is None:
        params = ReplicationParams(**cfg.replication)
        d = generate_replication_dataset(params, cfg.seed)
        return d, {"source": "replication", "seed": cfg.seed}
    path = Path(cfg.data)
    if not path.exists():
        raise ReportIOError(f"data file {path} does not exist")
    raw = load_dataset_csv(path)
    d = construct_dataset(raw, PerpetualInventoryConfig(cfg.delta), cfg.gap_years)
    return d, {
        "source": path.name,
        "interpolated_labour_years": sorted(set(raw.labour_gaps) | set(cfg.gap_years)),
        "capital_extended_from": raw.k.end_year + 1 if raw.k.end_year < raw.last_year else None,
    }


_GROWTH_LABELS = {"Q": "value added", "L": "labour", "K": "capital stock"}


def growth_section(d: Dataset) -> dict:
    rows = []
    for name in ("Q", "L", "K"):
        s = d.series(name)
        rows.append({"variable": name, "label": _GROWTH_LABELS[name], "geometric": cagr(s), "arithmetic": mean_growth(s)})
    return {"first_year": d.start_year, "last_year": d.end_year, "rows": rows}


def _unit_root_pair(s: AnnualSeries, spec: UnitRootSpec) -> dict:
    return {
        "adf": adf_test(s, spec.with_(test_kind="adf")).to_dict(),
        "pp": pp_test(s, spec.with_(test_kind="pp")).to_dict(),
    }


def _order(level: dict, diff: dict, test: str) -> Optional[int]:
    if level[test]["decision"] == "stationary":
        return 0
    if diff[test]["decision"] == "stationary":
        return 1
    return None


def unit_root_section(d: Dataset, spec: UnitRootSpec, per_capita: bool = False) -> dict:
    """ADF and PP on logged variables, in levels and first differences."""
    variables = {"lnQ": np.log(d["Q"]), "lnL": np.log(d["L"]), "lnK": np.log(d["K"])}
    if per_capita:
        variables["lnQ_L"] = variables["lnQ"] - variables["lnL"]
        variables["lnK_L"] = variables["lnK"] - variables["lnL"]
    rows = []
    for name, v in variables.items():
        s = AnnualSeries(name, d.start_year, v)
        level = _unit_root_pair(s, spec)
        diff = _unit_root_pair(difference(s), spec)
        rows.append({
            "variable": name,
            "level": level,
            "difference": diff,
            "order_adf": _order(level, diff, "adf"),
            "order_pp": _order(level, diff, "pp"),
        })
    n = len(d)
    return {
        "deterministics": spec.deterministics,
        "alpha": spec.alpha,
        "critical_values": {
            "level": list(critical_values(n - 1, spec.deterministics)),
            "difference": list(critical_values(n - 2, spec.deterministics)),
            "n_level": n - 1,
            "n_difference": n - 2,
        },
        "rows": rows,
    }


def scan_section(d: Dataset, cfg: PipelineConfig):
    rows = model_selection_scan(d, cfg.models, cfg.weights, cfg.alpha, cfg.bg_lags, workers=cfg.threads)
    return rows, {"weights": clean(cfg.to_dict()["weights"]), "rows": [r.to_dict() for r in rows]}


def estimation_section(fit: FitResult, spec: ModelSpec) -> dict:
    pv, pv1 = fit.pvalues, fit.pvalues_one_sided
    coefs = [
        {
            "name": n,
            "coef": fit.coefficients[n],
            "std_error": fit.std_errors[n],
            "t_stat": fit.t_stats[n],
            "pvalue": pv[n],
            "pvalue_one_sided": pv1[n],
        }
        for n in fit.names
    ]
    ar = None
    if fit.method == "ar1":
        ar = {"rho": fit.rho, "std_error": fit.rho_se, "t_stat": fit.rho_t, "pvalue": fit.rho_pvalue}
    return {
        "model": spec.label,
        "form": spec.form.value,
        "method": fit.method,
        "response": fit.response_name,
        "first_year": fit.residuals.start_year,
        "last_year": fit.residuals.end_year,
        "coefficients": coefs,
        "ar1": ar,
        "r2": fit.r2,
        "r2_transformed": fit.r2_transformed,
        "adj_r2": fit.adj_r2,
        "f_stat": fit.f_stat,
        "f_pvalue": fit.f_pvalue,
        "dw": fit.dw,
        "sigma2": fit.sigma2,
        "ssr": fit.ssr,
        "n_effective": fit.n_effective,
        "k": fit.k,
        "df_resid": fit.df_resid,
        "iterations": fit.iterations if fit.method == "ar1" else None,
        "last_step": fit.last_step if fit.method == "ar1" else None,
    }


def diagnostics_section(report: DiagnosticsReport) -> dict:
    return {
        "bg": report.bg.to_dict() if report.bg else None,
        "bpg": report.bpg.to_dict() if report.bpg else None,
        "jb": report.jb.to_dict() if report.jb else None,
        "mean_residual": report.mean_residual,
        "acf": [{"lag": r.lag, "acf": r.acf, "pacf": r.pacf, "band": r.band} for r in report.acf],
        "resid_regressor_corr": dict(report.resid_regressor_corr),
        "collinearity": report.collinearity.to_dict() if report.collinearity else None,
        "errors": dict(report.errors),
    }


def cointegration_section(fit: FitResult, cfg: PipelineConfig) -> dict:
    spec = cfg.unit_root.with_(alpha=cfg.alpha, ic=cfg.eg_ic)
    return engle_granger(fit, spec, cfg.critical_family, cfg.eg_residuals).to_dict()


def economics_section(fit: FitResult, spec: ModelSpec, d: Dataset, alpha: float) -> dict:
    prof = elasticities(fit, spec.form, d, "mean", alpha)
    rts, cls = returns_to_scale(prof)
    tc = technical_change(fit, alpha) if "T" in fit.names else None
    reg = regularity_check(fit, spec.form, d)
    return {
        "elasticities": prof.to_dict(),
        "rts": rts,
        "rts_class": cls,
        "technical_change": tc.to_dict() if tc else None,
        "regularity": reg.to_dict(),
    }


# -- bundle ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ReportBundle:
    """All report sections as one JSON-ready document plus the plot tables."""

    document: dict
    fit_plot: list = field(default_factory=list)
    residual_plot: list = field(default_factory=list)
    acf_plot: list = field(default_factory=list)

    def section(self, name: str):
        return self.document.get(name)


def _stage(name: str, func, *args, **kw):
    try:
        return func(*args, **kw)
    except ProdFnError as exc:
        if not getattr(exc, "stage", None):
            exc.stage = name
            exc.args = (f"[{name}] {exc}",)
        raise


def plot_tables(fit: FitResult, design: DesignMatrix, acf_rows: list[dict]):
    lost = design.n - fit.n_effective
    actual = design.response[lost:]
    years = fit.residuals.years
    fit_rows = [[int(y), float(a), float(f)] for y, a, f in zip(years, actual, fit.fitted.values)]
    res_rows = [[int(y), float(e)] for y, e in zip(years, fit.residuals.values)]
    acf = [[r["lag"], r["acf"], r["pacf"], r["band"]] for r in acf_rows]
    return clean(fit_rows), clean(res_rows), clean(acf)


def run_pipeline(cfg: PipelineConfig) -> ReportBundle:
    """Run every stage in order and collect the results.

    An error in any stage propagates with the stage name attached (as the
    ``stage`` attribute and a message prefix).
    """
    d, source = _stage("data", load_data, cfg)
    growth = _stage("growth", growth_section, d)
    chosen = cfg.spec
    scan_rows, scan = _stage("scan", scan_section, d, cfg)
    if chosen is None:
        best = next((r for r in scan_rows if r.ok), None)
        if best is None:
            raise InvalidParams("[scan] no model in the scan could be fitted")
        chosen = best.spec
    roots = _stage("unit_root", unit_root_section, d, cfg.unit_root.with_(alpha=cfg.alpha), chosen.form.is_per_capita)
    design, fit = _stage("estimation", fit_model, d, chosen)
    estimation = estimation_section(fit, chosen)
    diag_report = _stage("diagnostics", run_diagnostics, fit, design, cfg.bg_lags)
    diagnostics = diagnostics_section(diag_report)
    coint = _stage("cointegration", cointegration_section, fit, cfg)
    econ = _stage("economics", economics_section, fit, chosen, d, cfg.alpha)
    meta = {
        "n": len(d),
        "first_year": d.start_year,
        "last_year": d.end_year,
        "alpha": cfg.alpha,
        "model": chosen.label,
        **source,
    }
    document = clean({
        "meta": meta,
        "config": cfg.to_dict(),
        "growth": growth,
        "unit_root": roots,
        "scan": scan,
        "estimation": estimation,
        "diagnostics": diagnostics,
        "cointegration": coint,
        "economics": econ,
    })
    fit_rows, res_rows, acf_rows = plot_tables(fit, design, document["diagnostics"]["acf"])
    return ReportBundle(document, fit_rows, res_rows, acf_rows)
