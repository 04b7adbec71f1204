"""Wide-format indicator CSV ingestion.

Open-data indicator exports come as wide tables: one row per
(region, indicator) pair, one column per year, blank cells where a
measurement was never taken.  Region names may contain commas
("Bandung, Kota"), so the dialect is RFC-4180-style CSV with quoted
fields.  Parsing produces a sparse :class:`IndicatorTable` in which a
blank cell is an explicit missing value, never a zero.

The default column headers are ``Area Name`` and ``Indicator Name``;
both are overridable through :class:`WideCsvFormat`.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field

from .errors import (
    DuplicateKeyError,
    EmptyResultError,
    MalformedHeaderError,
    UnknownIndicatorError,
    UnknownRegionError,
    UnparsableCellError,
)


@dataclass(frozen=True)
class WideCsvFormat:
    """Dialect and column naming of a wide indicator CSV.

    ``permissive_numbers`` strips thousands separators ("1,234.5")
    before parsing; off by default so malformed numbers stay visible.
    ``drop_bad_rows`` enables noise-removal mode: rows containing
    unparsable or non-finite cells are dropped, and exact duplicate
    rows are deduplicated instead of raising.  Conflicting duplicates
    (same key, different values) are always an error.
    """

    region_col: str = "Area Name"
    indicator_col: str = "Indicator Name"
    delimiter: str = ","
    permissive_numbers: bool = False
    drop_bad_rows: bool = False


@dataclass
class IndicatorTable:
    """Sparse store of (region, indicator, year) -> optional value.

    ``records`` holds one entry per cell present in the source,
    including blank cells (value None).  ``regions`` and
    ``indicators`` preserve first-appearance order; ``years`` preserves
    header order.  All stored values are finite floats.
    """

    records: dict[tuple[str, str, int], float | None]
    regions: list[str] = field(default_factory=list)
    indicators: list[str] = field(default_factory=list)
    years: list[int] = field(default_factory=list)

    def value(self, region: str, indicator: str, year: int) -> float | None:
        return self.records.get((region, indicator, year))

    def has_value(self, region: str, indicator: str, year: int) -> bool:
        return self.records.get((region, indicator, year)) is not None

    def row_pairs(self) -> list[tuple[str, str]]:
        """Distinct (region, indicator) pairs in deterministic order."""
        present = {(r, i) for (r, i, _y) in self.records}
        ind_rank = {name: pos for pos, name in enumerate(self.indicators)}
        reg_rank = {name: pos for pos, name in enumerate(self.regions)}
        return sorted(present, key=lambda p: (reg_rank[p[0]], ind_rank[p[1]]))


@dataclass(frozen=True)
class CompletenessEntry:
    indicator: str
    year: int
    coverage: float
    complete: bool


@dataclass
class CompletenessReport:
    """Per (indicator, year) coverage over a region set.

    ``complete`` means every considered region has a non-missing value.
    Entries are sorted by indicator name, then year.
    """

    entries: list[CompletenessEntry]
    regions_considered: int

    def complete_pairs(self) -> set[tuple[str, int]]:
        return {(e.indicator, e.year) for e in self.entries if e.complete}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["indicator", "year", "coverage", "complete"])
        for e in self.entries:
            writer.writerow([e.indicator, e.year, repr(e.coverage),
                             "true" if e.complete else "false"])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "regions_considered": self.regions_considered,
            "entries": [
                {"indicator": e.indicator, "year": e.year,
                 "coverage": e.coverage, "complete": e.complete}
                for e in self.entries
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _parse_number(text: str, permissive: bool) -> float:
    if permissive:
        text = text.replace(",", "")
    # float() would accept "nan", "inf" and "1_000"; none are valid cells
    if "_" in text:
        raise ValueError(text)
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(text)
    return value


def _open_source(source):
    """Accept a filesystem path, CSV text, raw bytes, or a file object.

    A str with a newline is CSV content (paths never contain one);
    any other str or a PathLike is a filesystem path.
    """
    if isinstance(source, str) and ("\n" in source or source == ""):
        return io.StringIO(source)
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return io.StringIO(fh.read())
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return io.StringIO(data)
    raise TypeError(f"unsupported source type: {type(source)!r}")


def parse_wide_csv(source, fmt: WideCsvFormat | None = None) -> IndicatorTable:
    """Parse a wide indicator CSV into an :class:`IndicatorTable`.

    Blank or whitespace-only cells become missing values.  Rows shorter
    than the header are padded with missing cells (trailing blanks are
    commonly dropped by exporters); rows longer than the header are an
    error.  Region and indicator strings are trimmed.

    Raises MalformedHeaderError, DuplicateKeyError, or
    UnparsableCellError (with row/column position).
    """
    fmt = fmt or WideCsvFormat()
    stream = _open_source(source)
    reader = csv.reader(stream, delimiter=fmt.delimiter)

    header = next(reader, None)
    if header is None:
        raise MalformedHeaderError("input is empty: no header row")
    header = [h.strip() for h in header]

    try:
        region_idx = header.index(fmt.region_col)
        indicator_idx = header.index(fmt.indicator_col)
    except ValueError:
        raise MalformedHeaderError(
            f"header must contain {fmt.region_col!r} and {fmt.indicator_col!r} "
            f"columns; got {header!r}"
        ) from None

    year_cols: list[tuple[int, int]] = []
    for idx, name in enumerate(header):
        if idx in (region_idx, indicator_idx):
            continue
        try:
            year = int(name)
        except ValueError:
            raise MalformedHeaderError(
                f"column {name!r} is neither the region/indicator column nor "
                f"an integer year"
            ) from None
        year_cols.append((idx, year))
    if not year_cols:
        raise MalformedHeaderError("header contains no year columns")
    years = [y for _, y in year_cols]
    if len(set(years)) != len(years):
        raise MalformedHeaderError(f"duplicate year columns in header: {years}")

    records: dict[tuple[str, str, int], float | None] = {}
    regions: list[str] = []
    indicators: list[str] = []
    region_set: set[str] = set()
    indicator_set: set[str] = set()
    seen_pairs: set[tuple[str, str]] = set()

    for row_num, row in enumerate(reader, start=2):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) > len(header):
            raise UnparsableCellError(
                f"row {row_num} has {len(row)} cells but the header has "
                f"{len(header)}",
                row=row_num,
            )
        row = row + [""] * (len(header) - len(row))

        region = row[region_idx].strip()
        indicator = row[indicator_idx].strip()
        if not region:
            raise UnparsableCellError(
                f"row {row_num}: empty region name", row=row_num,
                column=fmt.region_col)
        if not indicator:
            raise UnparsableCellError(
                f"row {row_num}: empty indicator name", row=row_num,
                column=fmt.indicator_col)

        values: dict[int, float | None] = {}
        bad_cell: UnparsableCellError | None = None
        for idx, year in year_cols:
            cell = row[idx].strip()
            if cell == "":
                values[year] = None
                continue
            try:
                values[year] = _parse_number(cell, fmt.permissive_numbers)
            except ValueError:
                bad_cell = UnparsableCellError(
                    f"row {row_num}, column {year}: cell {cell!r} is not a "
                    f"finite number",
                    row=row_num, column=str(year))
                break
        if bad_cell is not None:
            if fmt.drop_bad_rows:
                continue
            raise bad_cell

        pair = (region, indicator)
        if pair in seen_pairs:
            existing = {y: records[(region, indicator, y)] for y in values}
            if fmt.drop_bad_rows and existing == values:
                continue
            raise DuplicateKeyError(
                f"row {row_num}: duplicate row for region {region!r}, "
                f"indicator {indicator!r}")
        seen_pairs.add(pair)

        if region not in region_set:
            region_set.add(region)
            regions.append(region)
        if indicator not in indicator_set:
            indicator_set.add(indicator)
            indicators.append(indicator)
        for year, value in values.items():
            records[(region, indicator, year)] = value

    # drop list entries orphaned by dropped rows
    live_regions = {r for (r, _i, _y) in records}
    live_indicators = {i for (_r, i, _y) in records}
    regions = [r for r in regions if r in live_regions]
    indicators = [i for i in indicators if i in live_indicators]

    return IndicatorTable(records=records, regions=regions,
                          indicators=indicators, years=years)


def write_wide_csv(table: IndicatorTable, fmt: WideCsvFormat | None = None) -> str:
    """Serialize a table back to wide CSV.

    Missing values stay blank; floats are written with shortest
    round-trip precision, so re-parsing yields an identical record set.
    Row order is deterministic (region order, then indicator order).
    """
    fmt = fmt or WideCsvFormat()
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=fmt.delimiter, lineterminator="\n")
    writer.writerow([fmt.region_col, fmt.indicator_col] +
                    [str(y) for y in table.years])
    for region, indicator in table.row_pairs():
        cells = []
        for year in table.years:
            value = table.records.get((region, indicator, year))
            cells.append("" if value is None else repr(value))
        writer.writerow([region, indicator] + cells)
    return buf.getvalue()


def completeness(table: IndicatorTable,
                 regions: list[str] | None = None) -> CompletenessReport:
    """Coverage of each (indicator, year) pair over a region set.

    Coverage is the fraction of considered regions holding a
    non-missing value; ``complete`` means coverage == 1.0.  The region
    subset, when given, must be non-empty and drawn from the table.
    """
    if regions is not None:
        if not regions:
            raise UnknownRegionError("region subset must be non-empty")
        known = set(table.regions)
        unknown = [r for r in regions if r not in known]
        if unknown:
            raise UnknownRegionError(f"unknown regions: {unknown!r}")
        considered = list(dict.fromkeys(regions))
    else:
        considered = table.regions

    pairs = sorted({(i, y) for (_r, i, y) in table.records})
    entries = []
    denom = len(considered)
    for indicator, year in pairs:
        covered = sum(
            1 for region in considered
            if table.records.get((region, indicator, year)) is not None)
        coverage = covered / denom
        entries.append(CompletenessEntry(
            indicator=indicator, year=year, coverage=coverage,
            complete=covered == denom))
    return CompletenessReport(entries=entries, regions_considered=denom)


def slice_year(table: IndicatorTable, indicators: list[str],
               year: int) -> dict[str, list[float]]:
    """Row-complete join: regions holding ALL requested indicators.

    Returns region -> value vector in the requested indicator order,
    keeping only regions with a non-missing value for every indicator
    in the given year.  Raises UnknownIndicatorError for indicators
    absent from the table and EmptyResultError when no region is
    complete (an unknown year also yields an empty join).
    """
    known = set(table.indicators)
    unknown = [i for i in indicators if i not in known]
    if unknown:
        raise UnknownIndicatorError(f"unknown indicators: {unknown!r}")

    out: dict[str, list[float]] = {}
    for region in table.regions:
        values = [table.records.get((region, ind, year)) for ind in indicators]
        if all(v is not None for v in values):
            out[region] = values  # type: ignore[assignment]
    if not out:
        raise EmptyResultError(
            f"no region has complete values for {indicators!r} in {year}")
    return out
