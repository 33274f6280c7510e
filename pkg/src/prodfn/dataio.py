"""CSV input and output.

Schema: a header row naming ``year,q,l,k`` and optionally ``i``
(investment), then one row per consecutive year.  A blank labour cell marks
a non-census year to be filled by geometric interpolation.  Capital may be
left blank for a run of final years provided investment is given there; those
years are generated by the perpetual-inventory recursion.  Investment may be
blank anywhere it is not needed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .construction import (
    BenchmarkTable,
    PerpetualInventoryConfig,
    assemble_dataset,
    extend_capital_stock,
    geometric_interpolate,
)
from .errors import (
    DuplicateYear,
    MissingColumn,
    MissingInvestment,
    NonNumericCell,
    ParseError,
    ReportIOError,
)
from .series import AnnualSeries, Dataset

__all__ = ["RawBundle", "load_dataset_csv", "write_dataset_csv", "construct_dataset", "COLUMNS"]

COLUMNS = ("year", "q", "l", "k", "i")
_REQUIRED = ("year", "q", "l", "k")


@dataclass(frozen=True, eq=False)
class RawBundle:
    """The series as read from disk, before gaps are filled."""

    q: AnnualSeries
    labour: dict[int, float]
    k: AnnualSeries
    i: Optional[AnnualSeries]
    first_year: int
    last_year: int

    @property
    def labour_gaps(self) -> list[int]:
        return [y for y in range(self.first_year, self.last_year + 1) if y not in self.labour]

    @property
    def benchmarks(self) -> BenchmarkTable:
        return BenchmarkTable(self.labour)


def _cell(text: str, line: int, column: str) -> Optional[float]:
    text = text.strip()
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        raise NonNumericCell(f"cannot read {text!r} as a number", line, column) from None
    if not np.isfinite(value):
        raise NonNumericCell(f"non-finite value {text!r}", line, column)
    return value


def load_dataset_csv(path: str | Path) -> RawBundle:
    """Parse a data file into a :class:`RawBundle`."""
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(f"cannot open {path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file, header expected", 1) from None
        header = [h.strip().lower() for h in header]
        for col in _REQUIRED:
            if col not in header:
                raise MissingColumn(f"column {col!r} missing from header of {path}")
        pos = {c: header.index(c) for c in COLUMNS if c in header}
        rows = []
        seen = {}
        for line, row in enumerate(reader, start=2):
            if not any(cell.strip() for cell in row):
                continue
            if len(row) < len(header):
                row = row + [""] * (len(header) - len(row))
            ytext = row[pos["year"]].strip()
            try:
                year = int(ytext)
            except ValueError:
                raise NonNumericCell(f"bad year {ytext!r}", line, "year") from None
            if year in seen:
                raise DuplicateYear(year, line)
            if rows and year != rows[-1][0] + 1:
                raise ParseError(f"year {year} does not follow {rows[-1][0]}", line, "year")
            seen[year] = line
            vals = {c: _cell(row[p], line, c) for c, p in pos.items() if c != "year"}
            rows.append((year, line, vals))
    if not rows:
        raise ParseError("no data rows", 2)
    first, last = rows[0][0], rows[-1][0]
    for year, line, vals in rows:
        if vals["q"] is None:
            raise ParseError("output may not be blank", line, "q")
    q = AnnualSeries("Q", first, [v["q"] for _, _, v in rows])
    labour = {y: v["l"] for y, _, v in rows if v["l"] is not None}
    k_vals = [v["k"] for _, _, v in rows]
    n_k = len(k_vals)
    while n_k and k_vals[n_k - 1] is None:
        n_k -= 1
    if n_k == 0:
        raise ParseError("capital column is entirely blank", rows[0][1], "k")
    for idx in range(n_k):
        if k_vals[idx] is None:
            raise ParseError("capital may only be blank in the final years", rows[idx][1], "k")
    k = AnnualSeries("K", first, k_vals[:n_k])
    i = None
    if "i" in pos:
        i_vals = [(y, v["i"]) for y, _, v in rows if v["i"] is not None]
        if i_vals:
            years = [y for y, _ in i_vals]
            # keep the longest run of consecutive years ending at the last entry
            start = len(years) - 1
            while start > 0 and years[start - 1] == years[start] - 1:
                start -= 1
            i = AnnualSeries("I", years[start], [v for _, v in i_vals[start:]])
    return RawBundle(q, labour, k, i, first, last)


def construct_dataset(
    raw: RawBundle,
    pim: PerpetualInventoryConfig = PerpetualInventoryConfig(),
    gap_years: Iterable[int] = (),
) -> Dataset:
    """Fill labour gaps, extend capital, and align into ``Q, L, K, T``.

    ``gap_years`` are treated as non-census years even when a labour value
    is present.
    """
    drop = set(int(y) for y in gap_years)
    labour = geometric_interpolate(BenchmarkTable({y: v for y, v in raw.labour.items() if y not in drop}))
    k = raw.k
    if k.end_year < raw.last_year:
        if raw.i is None:
            raise MissingInvestment(k.end_year + 1)
        k = extend_capital_stock(k, raw.i, pim, through=raw.last_year)
    return assemble_dataset(raw.q, labour, k)


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def write_dataset_csv(data: Dataset | RawBundle, path: str | Path, investment: AnnualSeries | None = None) -> Path:
    """Write ``data`` in the input schema; floats are written with ``repr`` so
    reading the file back reproduces them exactly."""
    path = Path(path)
    if isinstance(data, RawBundle):
        years = range(data.first_year, data.last_year + 1)
        q, k, inv = data.q.to_dict(), data.k.to_dict(), data.i.to_dict() if data.i is not None else {}
        lab = data.labour
    else:
        years = [int(y) for y in data.years]
        q = dict(zip(years, data["Q"]))
        lab = dict(zip(years, data["L"]))
        k = dict(zip(years, data["K"]))
        inv = investment.to_dict() if investment is not None else {}
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            w = csv.writer(handle, lineterminator="\n")
            w.writerow(COLUMNS)
            for y in years:
                w.writerow([y, _fmt(q.get(y)), _fmt(lab.get(y)), _fmt(k.get(y)), _fmt(inv.get(y))])
    except OSError as exc:
        raise ReportIOError(f"cannot write {path}: {exc}") from exc
    return path
