"""Text and JSON rendering of a report document, plus the plot-data files.

The text report is rendered from the same document that is written as JSON,
so the two can only differ by rounding: statistics are printed to three
decimals and p-values to four.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

from .errors import InvalidParams, ReportIOError
from .pipeline import ReportBundle

__all__ = ["render_text", "emit_report", "read_report_json", "REPORT_FILES"]

REPORT_FILES = ("report.txt", "report.json", "fit_plot.csv", "residual_plot.csv", "acf_plot.csv")
NOT_RUN = "not run"


def f3(v) -> str:
    return "n/a" if v is None else f"{v:.3f}"


def f4(v) -> str:
    return "n/a" if v is None else f"{v:.4f}"


def pct(v) -> str:
    return "n/a" if v is None else f"{100 * v:.3f}%"


def yn(v) -> str:
    return "n/a" if v is None else ("yes" if v else "no")


def table(header: list[str], rows: Iterable[list[str]], indent: str = "  ", left: int = 1) -> list[str]:
    """Left-align the first ``left`` columns, right-align the rest."""
    rows = [list(map(str, r)) for r in rows]
    widths = [max(len(str(h)), *(len(r[j]) for r in rows)) if rows else len(str(h)) for j, h in enumerate(header)]

    def line(cells):
        out = [str(c).ljust(w) if j < left else str(c).rjust(w) for j, (c, w) in enumerate(zip(cells, widths))]
        return indent + "  ".join(out).rstrip()

    return [line(header), indent + "-" * (sum(widths) + 2 * (len(widths) - 1))] + [line(r) for r in rows]


def _title(text: str) -> list[str]:
    return ["", text, "=" * len(text)]


def _meta(doc: dict) -> list[str]:
    m = doc.get("meta")
    if not m:
        return []
    src = m.get("source", "")
    if src == "replication":
        src = f"replication dataset (seed {m.get('seed')})"
    lines = [
        "PRODUCTION FUNCTION REPORT",
        f"Data: {src}, {m.get('first_year')}-{m.get('last_year')}, n = {m.get('n')}",
        f"Model: {m.get('model')}   significance level: {m.get('alpha')}",
    ]
    if m.get("interpolated_labour_years"):
        lines.append("Labour interpolated for: " + ", ".join(map(str, m["interpolated_labour_years"])))
    if m.get("capital_extended_from"):
        lines.append(f"Capital extended by perpetual inventory from {m['capital_extended_from']}")
    return lines


def _growth(sec) -> list[str]:
    out = _title("Average annual growth rates")
    if not sec:
        return out + ["  " + NOT_RUN]
    out.append(f"  {sec['first_year']}-{sec['last_year']}")
    out += table(
        ["Variable", "Geometric", "Arithmetic"],
        [[r["label"], pct(r["geometric"]), pct(r["arithmetic"])] for r in sec["rows"]],
    )
    return out


def _unit_root(sec) -> list[str]:
    out = _title("Unit-root tests")
    if not sec:
        return out + ["  " + NOT_RUN]
    out.append(f"  deterministics: {sec['deterministics']}; decisions at {sec['alpha']}")
    rows = []
    for r in sec["rows"]:
        for label, key in (("level", "level"), ("1st diff", "difference")):
            a, p = r[key]["adf"], r[key]["pp"]
            rows.append([
                r["variable"] if key == "level" else "", label,
                f3(a["statistic"]), f4(a["pvalue"]), a["lags"], a["decision"],
                f3(p["statistic"]), f4(p["pvalue"]), p["bandwidth"], p["decision"],
            ])
    header = ["Variable", "Series", "ADF", "p", "lags", "ADF decision", "PP", "p", "bw", "PP decision"]
    out += table(header, rows, left=2)
    out.append("")
    for r in sec["rows"]:
        oa, op = r["order_adf"], r["order_pp"]
        out.append(
            f"  {r['variable']}: ADF {'I(%d)' % oa if oa is not None else 'inconclusive'}, "
            f"PP {'I(%d)' % op if op is not None else 'inconclusive'}"
        )
    cv = sec["critical_values"]
    out.append("")
    for key, n in (("level", cv["n_level"]), ("difference", cv["n_difference"])):
        c1, c5, c10 = cv[key]
        out.append(f"  critical values, {key} (n={n}): 1% {f3(c1)}  5% {f3(c5)}  10% {f3(c10)}")
    return out


def _scan(sec) -> list[str]:
    out = _title("Model comparison")
    if not sec:
        return out + ["  " + NOT_RUN]
    w = sec["weights"]
    out.append(
        f"  weights: theory {w['theory']}, significance {w['significance']}, "
        f"diagnostics {w['diagnostics']}, fit {w['fit']}"
    )
    rows = []
    for r in sec["rows"]:
        if r["ok"]:
            s, d = r["scores"], r["detail"]
            rows.append([r["rank"], r["model"], f3(r["total"]), f3(s["theory"]), d.get("significant", ""),
                         f3(s["diagnostics"]), f3(s["fit"])])
        else:
            rows.append([r["rank"], r["model"], "failed", "", "", "", "", r["error"]])
    header = ["Rank", "Model", "Score", "Theory", "Significant", "Diagnostics", "Adj. R2"]
    out += table(header, [r[:7] for r in rows], left=2)
    for r in rows:
        if len(r) > 7:
            out.append(f"  {r[1]}: {r[7]}")
    return out


def _estimation(sec) -> list[str]:
    out = _title("Estimation results")
    if not sec:
        return out + ["  " + NOT_RUN]
    out.append(
        f"  {sec['model']} by {'Cochrane-Orcutt AR(1)' if sec['method'] == 'ar1' else 'least squares'}; "
        f"dependent variable {sec['response']}, {sec['first_year']}-{sec['last_year']}"
    )
    rows = [
        [c["name"], f3(c["coef"]), f3(c["std_error"]), f3(c["t_stat"]), f4(c["pvalue"]), f4(c["pvalue_one_sided"])]
        for c in sec["coefficients"]
    ]
    ar = sec.get("ar1")
    if ar:
        rows.append(["AR(1)", f3(ar["rho"]), f3(ar["std_error"]), f3(ar["t_stat"]), f4(ar["pvalue"]), ""])
    out += table(["Variable", "Coefficient", "Std. error", "t-stat", "p (2-sided)", "p (1-sided)"], rows)
    out.append("")
    stats_rows = [
        ["R-squared", f3(sec["r2"])],
        ["R-squared, transformed regression", f3(sec["r2_transformed"])] if sec.get("r2_transformed") is not None else None,
        ["Adjusted R-squared", f3(sec["adj_r2"])],
        ["F-statistic", f3(sec["f_stat"])],
        ["p (F)", f4(sec["f_pvalue"])],
        ["Durbin-Watson", f3(sec["dw"])],
        ["Observations after adjustment", sec["n_effective"]],
        ["Iterations", sec["iterations"]] if sec.get("iterations") is not None else None,
    ]
    out += table(["Statistic", "Value"], [r for r in stats_rows if r])
    return out


def _diagnostics(sec) -> list[str]:
    out = _title("Diagnostics")
    if not sec:
        return out + ["  " + NOT_RUN]
    rows = []
    bg = sec.get("bg")
    rows.append(["Breusch-Godfrey LM" + (f" ({bg['lags']} lags)" if bg else ""),
                 f3(bg["statistic"]) if bg else NOT_RUN, bg["df"] if bg else "", f4(bg["pvalue"]) if bg else ""])
    bpg = sec.get("bpg")
    rows.append(["Breusch-Pagan-Godfrey" + (f" ({bpg['variant']})" if bpg else ""),
                 f3(bpg["statistic"]) if bpg else NOT_RUN, bpg["df"] if bpg else "", f4(bpg["pvalue"]) if bpg else ""])
    jb = sec.get("jb")
    rows.append(["Jarque-Bera", f3(jb["statistic"]) if jb else NOT_RUN, 2 if jb else "", f4(jb["pvalue"]) if jb else ""])
    out += table(["Test", "Statistic", "df", "p-value"], rows)
    if jb:
        out.append(f"  skewness {f3(jb['skewness'])}, excess kurtosis {f3(jb['excess_kurtosis'])}")
    mr = sec.get("mean_residual")
    out.append(f"  mean residual {'n/a' if mr is None else f'{mr:.3e}'}")
    out.append("")
    acf = sec.get("acf") or []
    if acf:
        out += table(["Lag", "ACF", "PACF", "Band"],
                     [[r["lag"], f3(r["acf"]), f3(r["pacf"]), f3(r["band"])] for r in acf])
    else:
        out.append("  autocorrelations: " + NOT_RUN)
    out.append("")
    corr = sec.get("resid_regressor_corr") or {}
    if corr:
        out += table(["Regressor", "Corr. with residual"], [[k, f3(v)] for k, v in corr.items()])
    else:
        out.append("  residual-regressor correlation: " + NOT_RUN)
    out.append("")
    col = sec.get("collinearity")
    if col:
        out += table(["Regressor", "VIF"], [[k, f3(v)] for k, v in col["vif"].items()])
        out.append(f"  condition number {f3(col['condition_number'])}; "
                   f"high R2 with few significant t: {yn(col['flag_high_r2_few_t'])}; "
                   f"pairwise |corr| > 0.9: {yn(col['flag_high_corr'])}")
    else:
        out.append("  collinearity: " + NOT_RUN)
    for k, v in (sec.get("errors") or {}).items():
        out.append(f"  {k}: {NOT_RUN} ({v})")
    return out


def _cointegration(sec) -> list[str]:
    out = _title("Cointegration (residual stationarity)")
    if not sec:
        return out + ["  " + NOT_RUN]
    out.append(f"  residuals: {sec['residuals']}; decision from {sec['critical_family']} critical values; "
               f"{sec['n_variables']} variables")
    rows = []
    for label, key in (("ADF", "adf"), ("PP", "pp"), ("ADF, DF values", "adf_df"), ("PP, DF values", "pp_df")):
        r = sec[key]
        rows.append([label, f3(r["statistic"]), f4(r["pvalue"]), f3(r["cv1"]), f3(r["cv5"]), f3(r["cv10"]), r["decision"]])
    out += table(["Test", "Statistic", "p", "1%", "5%", "10%", "Decision"], rows)
    out.append(f"  residuals {sec['decision']}: {'cointegrated' if sec['cointegrated'] else 'no cointegration'}")
    return out


def _economics(sec) -> list[str]:
    out = _title("Economic interpretation")
    if not sec:
        return out + ["  " + NOT_RUN]
    e = sec["elasticities"]
    where = "constant" if e["evaluation_point"] == "constant" else "at sample means"
    rows = [
        ["Elasticity w.r.t. capital", f3(e["eps_K"])],
        ["Elasticity w.r.t. labour", f3(e["eps_L"])],
        ["Returns to scale", f"{f3(sec['rts'])} ({sec['rts_class']})"],
    ]
    tc = sec.get("technical_change")
    if tc:
        rows.append(["Technical change per year", f"{f3(tc['gamma'])} (t {f3(tc['t_stat'])}, p {f4(tc['pvalue'])}; {tc['label']})"])
    reg = sec["regularity"]
    rows.append(["Years meeting all regularity conditions", f3(reg["share_all_conditions"])])
    rows.append(["Economic zone, capital", yn(reg["economic_zone_K"])])
    rows.append(["Economic zone, labour", yn(reg["economic_zone_L"])])
    out.append(f"  elasticities {where}")
    out += table(["Measure", "Value"], rows)
    return out


def render_text(doc: dict) -> str:
    """Render whichever sections ``doc`` has; absent sections print as not run."""
    lines = _meta(doc)
    for key, fn in (
        ("growth", _growth),
        ("unit_root", _unit_root),
        ("scan", _scan),
        ("estimation", _estimation),
        ("diagnostics", _diagnostics),
        ("cointegration", _cointegration),
        ("economics", _economics),
    ):
        if key in doc or doc.get("meta"):
            lines += fn(doc.get(key))
    return "\n".join(lines).lstrip("\n") + "\n"


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as handle:
        w = csv.writer(handle, lineterminator="\n")
        w.writerow(header)
        w.writerows(["" if v is None else repr(v) if isinstance(v, float) else v for v in r] for r in rows)


def emit_report(bundle: ReportBundle, out_dir: str | Path, fmt: str = "both") -> list[Path]:
    """Write the report files into ``out_dir`` and return their paths."""
    if fmt not in ("text", "structured", "both"):
        raise InvalidParams(f"unknown format {fmt!r}")
    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        if fmt in ("text", "both"):
            p = out / "report.txt"
            p.write_text(render_text(bundle.document), encoding="utf-8")
            written.append(p)
        if fmt in ("structured", "both"):
            p = out / "report.json"
            p.write_text(to_json(bundle.document), encoding="utf-8")
            written.append(p)
        for name, header, rows in (
            ("fit_plot.csv", ["year", "actual", "fitted"], bundle.fit_plot),
            ("residual_plot.csv", ["year", "residual"], bundle.residual_plot),
            ("acf_plot.csv", ["lag", "acf", "pacf", "band"], bundle.acf_plot),
        ):
            p = out / name
            _write_csv(p, header, rows)
            written.append(p)
    except OSError as exc:
        raise ReportIOError(f"cannot write report to {out}: {exc}") from exc
    return written


def read_report_json(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ReportIOError(f"cannot read {path}: {exc}") from exc
