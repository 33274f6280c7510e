"""Command-line interface.

Each subcommand is a thin wrapper over library calls::

    prodfn replicate --seed 7 --out data/
    prodfn prepare --input raw.csv --out data/
    prodfn estimate --input data/dataset.csv --form cd_tinbergen --ar1
    prodfn report --config run.json --out report/

Exit status: 0 success, 2 configuration error, 3 data error, 4 numerical
failure, 5 I/O error.  ``PRODFN_THREADS`` caps the worker threads used by
the model scan.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .analysis import ReplicationParams, generate_replication_dataset
from .construction import PerpetualInventoryConfig
from .dataio import construct_dataset, load_dataset_csv, write_dataset_csv
from .diagnostics import run_diagnostics
from .errors import ConfigError, InvalidParams, ProdFnError, ReportIOError
from .estimation import fit_model
from .forms import ALL_FORMS
from .pipeline import (
    PipelineConfig,
    clean,
    cointegration_section,
    diagnostics_section,
    estimation_section,
    load_data,
    run_pipeline,
    scan_section,
    unit_root_section,
)
from .report import emit_report, render_text, to_json

COMMANDS = ("prepare", "unitroot", "estimate", "diagnose", "cointegrate", "scan", "replicate", "report")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--input", help="data CSV (year,q,l,k[,i]); default: replication dataset")
    p.add_argument("--seed", type=int, help="seed for the replication dataset")
    p.add_argument("--form", choices=[f.value for f in ALL_FORMS], help="functional form to estimate")
    p.add_argument("--ar1", action=argparse.BooleanOptionalAction, default=None, help="AR(1) error correction")
    p.add_argument("--alpha", choices=("0.01", "0.05", "0.10"), help="significance level")
    p.add_argument("--out", help="output directory (default: print to stdout; 'report' for the report command)")
    p.add_argument("--format", choices=("text", "structured", "both"), help="output format")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prodfn", description="Production-function estimation toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()
    helps = {
        "prepare": "fill labour gaps and extend capital, write dataset.csv",
        "unitroot": "ADF and PP tests on the logged variables",
        "estimate": "fit one functional form",
        "diagnose": "residual diagnostics for the fitted form",
        "cointegrate": "residual stationarity (Engle-Granger) test",
        "scan": "fit and rank a set of functional forms",
        "replicate": "write a synthetic replication dataset",
        "report": "run the whole pipeline and write the report files",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _threads() -> int:
    raw = os.environ.get("PRODFN_THREADS")
    if raw is None or raw.strip() == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InvalidParams(f"PRODFN_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InvalidParams(f"PRODFN_THREADS must be a positive integer, got {raw!r}")
    return n


def config_from_args(args) -> PipelineConfig:
    cfg = PipelineConfig.from_json(args.config) if args.config else PipelineConfig()
    changes = {"threads": _threads()}
    if args.input is not None:
        changes["data"] = args.input
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.form is not None:
        changes["form"] = args.form
    if args.ar1 is not None:
        changes["ar1"] = args.ar1
    if args.alpha is not None:
        changes["alpha"] = float(args.alpha)
    if args.out is not None:
        changes["out"] = args.out
    if args.format is not None:
        changes["formats"] = args.format
    return cfg.with_(**changes)


def _emit(doc: dict, name: str, args, cfg: PipelineConfig) -> None:
    doc = clean(doc)
    fmt = cfg.formats if args.format or args.config else "text"
    if args.out is None:
        sys.stdout.write(to_json(doc) if fmt == "structured" else render_text(doc))
        return
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if fmt in ("text", "both"):
            (out / f"{name}.txt").write_text(render_text(doc), encoding="utf-8")
        if fmt in ("structured", "both"):
            (out / f"{name}.json").write_text(to_json(doc), encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(f"cannot write to {out}: {exc}") from exc
    print(f"wrote {name} output to {out}")


def _fit(cfg):
    if cfg.spec is None:
        raise InvalidParams("no functional form selected; pass --form")
    d, _ = load_data(cfg)
    design, fit = fit_model(d, cfg.spec)
    return d, design, fit


def run(args) -> int:
    cfg = config_from_args(args)
    cmd = args.command
    if cmd == "replicate":
        d = generate_replication_dataset(ReplicationParams(**cfg.replication), cfg.seed)
        path = write_dataset_csv(d, Path(args.out or ".") / "replication.csv")
        print(f"wrote {path}")
    elif cmd == "prepare":
        if cfg.data is None:
            raise InvalidParams("prepare needs --input or a config with 'data'")
        if not Path(cfg.data).exists():
            raise ReportIOError(f"data file {cfg.data} does not exist")
        raw = load_dataset_csv(cfg.data)
        d = construct_dataset(raw, PerpetualInventoryConfig(cfg.delta), cfg.gap_years)
        path = write_dataset_csv(d, Path(args.out or ".") / "dataset.csv")
        print(f"wrote {path} ({len(d)} rows, {d.start_year}-{d.end_year})")
    elif cmd == "unitroot":
        d, _ = load_data(cfg)
        spec = cfg.spec
        per_capita = spec is not None and spec.form.is_per_capita
        _emit({"unit_root": unit_root_section(d, cfg.unit_root.with_(alpha=cfg.alpha), per_capita)}, cmd, args, cfg)
    elif cmd == "estimate":
        _, _, fit = _fit(cfg)
        _emit({"estimation": estimation_section(fit, cfg.spec)}, cmd, args, cfg)
    elif cmd == "diagnose":
        _, design, fit = _fit(cfg)
        _emit({"diagnostics": diagnostics_section(run_diagnostics(fit, design, cfg.bg_lags))}, cmd, args, cfg)
    elif cmd == "cointegrate":
        _, _, fit = _fit(cfg)
        _emit({"cointegration": cointegration_section(fit, cfg)}, cmd, args, cfg)
    elif cmd == "scan":
        d, _ = load_data(cfg)
        _, section = scan_section(d, cfg)
        _emit({"scan": section}, cmd, args, cfg)
    elif cmd == "report":
        bundle = run_pipeline(cfg)
        written = emit_report(bundle, cfg.out, cfg.formats)
        for p in written:
            print(f"wrote {p}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except ProdFnError as exc:
        print(f"prodfn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
