"""Annual time series container, CSV ingestion and deterministic transforms.

Everything downstream (filters, estimation, simulation) works on
:class:`AnnualSeries`: a contiguous run of annual observations tagged with a
unit. Transforms in this module are pure functions; each one states its
domain and raises :class:`~saesg.errors.DataError` with the offending year or
row when the domain is violated.

Unit conventions
----------------
The canonical internal unit for rates is the decimal rate (0.08, not 8.0).
Percent-quoted inputs are converted at ingestion or via :func:`as_decimal`
and keep an explicit unit tag until then.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError


class Unit(enum.Enum):
    INDEX_LEVEL = "index_level"
    RATE_DECIMAL = "rate_decimal"
    RATE_PERCENT = "rate_percent"
    LOG_VALUE = "log_value"


@dataclass(frozen=True)
class AnnualSeries:
    """A gapless run of annual observations starting at ``start_year``.

    Values are stored as a read-only float64 array; the year axis is implied
    by ``start_year`` and the array length, which makes gaps unrepresentable
    by construction.
    """

    start_year: int
    values: np.ndarray
    unit: Unit = Unit.RATE_DECIMAL
    name: str = ""

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise DataError(f"series {self.name!r}: need a non-empty 1-D value array")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise DataError(
                f"series {self.name!r}: non-finite value in year {self.start_year + bad}"
            )
        if self.unit is Unit.INDEX_LEVEL and np.any(arr <= 0.0):
            bad = int(np.flatnonzero(arr <= 0.0)[0])
            raise DataError(
                f"series {self.name!r}: index level must be strictly positive, "
                f"got {arr[bad]} in year {self.start_year + bad}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def end_year(self) -> int:
        return self.start_year + len(self) - 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.start_year + len(self))

    def covers(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year

    def value_in(self, year: int) -> float:
        if not self.covers(year):
            raise DataError(
                f"series {self.name!r}: year {year} outside "
                f"{self.start_year}..{self.end_year}"
            )
        return float(self.values[year - self.start_year])

    def window(self, first_year: int, last_year: int) -> "AnnualSeries":
        """Inclusive sub-series clipped to the available range."""
        lo = max(first_year, self.start_year)
        hi = min(last_year, self.end_year)
        if lo > hi:
            raise DataError(
                f"series {self.name!r}: window {first_year}..{last_year} does not "
                f"overlap {self.start_year}..{self.end_year}"
            )
        i, j = lo - self.start_year, hi - self.start_year + 1
        return AnnualSeries(lo, self.values[i:j], self.unit, self.name)


def align(*series: AnnualSeries) -> tuple[AnnualSeries, ...]:
    """Clip all series to their common year range (inclusive intersection)."""
    lo = max(s.start_year for s in series)
    hi = min(s.end_year for s in series)
    if lo > hi:
        names = ", ".join(repr(s.name) for s in series)
        raise DataError(f"series {names} share no common years")
    return tuple(s.window(lo, hi) for s in series)


def as_decimal(series: AnnualSeries) -> AnnualSeries:
    """Convert a rate series to the canonical decimal unit."""
    if series.unit is Unit.RATE_DECIMAL:
        return series
    if series.unit is Unit.RATE_PERCENT:
        return AnnualSeries(series.start_year, series.values / 100.0,
                            Unit.RATE_DECIMAL, series.name)
    raise DataError(f"series {series.name!r}: cannot convert {series.unit.value} to a decimal rate")


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------

def _parse_year(raw: str, row_no: int, path: str) -> int:
    try:
        f = float(raw)
    except ValueError:
        raise DataError(f"{path}: row {row_no}: non-numeric year {raw!r}") from None
    if f != int(f):
        raise DataError(f"{path}: row {row_no}: fractional year {raw!r}")
    return int(f)


def _parse_value(raw: str, row_no: int, path: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise DataError(f"{path}: row {row_no}: non-numeric value {raw!r}") from None


def _rows_to_series(rows: list[tuple[int, float]], unit: Unit, name: str,
                    path: str) -> AnnualSeries:
    rows.sort(key=lambda r: r[0])
    years = [r[0] for r in rows]
    for prev, cur in zip(years, years[1:]):
        if cur == prev:
            raise DataError(f"{path}: duplicate year {cur}")
        if cur != prev + 1:
            raise DataError(f"{path}: missing year {prev + 1}")
    return AnnualSeries(years[0], np.array([r[1] for r in rows]), unit, name)


def load_series(path: str | Path, unit: Unit = Unit.RATE_DECIMAL,
                column_map: dict[str, str] | None = None,
                name: str = "") -> AnnualSeries:
    """Load a single-column annual CSV (columns ``year`` and ``value``).

    Parameters
    ----------
    path : CSV file with a header row.
    unit : unit tag to attach to the loaded values.
    column_map : optional logical -> physical column-name mapping, e.g.
        ``{"year": "Year", "value": "CPI"}``.
    """
    path = Path(path)
    cmap = {"year": "year", "value": "value"}
    cmap.update(column_map or {})
    if not path.exists():
        raise DataError(f"data file not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        for logical in ("year", "value"):
            if cmap[logical] not in cols:
                raise DataError(f"{path}: missing column {cmap[logical]!r} (have {cols})")
        rows: list[tuple[int, float]] = []
        for row_no, row in enumerate(reader, start=2):
            rows.append((_parse_year(row[cmap["year"]], row_no, str(path)),
                         _parse_value(row[cmap["value"]], row_no, str(path))))
    if not rows:
        raise DataError(f"{path}: no data rows")
    return _rows_to_series(rows, unit, name or path.stem, str(path))


def load_multi_series(path: str | Path, unit: Unit = Unit.RATE_DECIMAL,
                      column_map: dict[str, str] | None = None,
                      ) -> dict[str, AnnualSeries]:
    """Load a long CSV with ``year``, ``series``, ``value`` columns.

    Used for instrument panels such as inflation-linked bond yields quoted
    per maturity, where the issues start in different years.
    """
    path = Path(path)
    cmap = {"year": "year", "value": "value", "series": "series"}
    cmap.update(column_map or {})
    if not path.exists():
        raise DataError(f"data file not found: {path}")
    groups: dict[str, list[tuple[int, float]]] = {}
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        for logical in ("year", "value", "series"):
            if cmap[logical] not in cols:
                raise DataError(f"{path}: missing column {cmap[logical]!r} (have {cols})")
        for row_no, row in enumerate(reader, start=2):
            key = row[cmap["series"]].strip()
            if not key:
                raise DataError(f"{path}: row {row_no}: empty series label")
            groups.setdefault(key, []).append(
                (_parse_year(row[cmap["year"]], row_no, str(path)),
                 _parse_value(row[cmap["value"]], row_no, str(path))))
    if not groups:
        raise DataError(f"{path}: no data rows")
    return {k: _rows_to_series(v, unit, k, str(path)) for k, v in groups.items()}


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def _log_diff(series: AnnualSeries, what: str) -> AnnualSeries:
    if len(series) < 2:
        raise DataError(f"{what}: need at least 2 observations, got {len(series)}")
    v = series.values
    if np.any(v <= 0.0):
        bad = int(np.flatnonzero(v <= 0.0)[0])
        raise DataError(
            f"{what}: non-positive level {v[bad]} in year {series.start_year + bad}"
        )
    out = np.diff(np.log(v))
    return AnnualSeries(series.start_year + 1, out, Unit.RATE_DECIMAL, series.name)


def force_of_inflation(index: AnnualSeries) -> AnnualSeries:
    """Continuously compounded annual growth of a price index.

    delta_q(t) = ln Q(t) - ln Q(t-1); output starts one year after the index.
    """
    out = _log_diff(index, "force_of_inflation")
    return AnnualSeries(out.start_year, out.values, out.unit, "force_of_inflation")


def log_growth(series: AnnualSeries) -> AnnualSeries:
    """Log growth rate of a positive level series (e.g. a dividend index)."""
    out = _log_diff(series, "log_growth")
    return AnnualSeries(out.start_year, out.values, out.unit, f"log_growth({series.name})")


def short_rate_from_index(index: AnnualSeries) -> AnnualSeries:
    """Annual force of return implied by a rolled-up money market index."""
    out = _log_diff(index, "short_rate_from_index")
    return AnnualSeries(out.start_year, out.values, out.unit, "short_rate")


def derive_dividends(price: AnnualSeries, dividend_yield: AnnualSeries) -> AnnualSeries:
    """Dividend index implied by a price index and its dividend yield: D = P * Y.

    The yield is converted to a decimal rate first; zero yields are allowed
    (a zero dividend), negative yields are not.
    """
    p, y = align(price, as_decimal(dividend_yield))
    if np.any(y.values < 0.0):
        bad = int(np.flatnonzero(y.values < 0.0)[0])
        raise DataError(
            f"derive_dividends: negative yield {y.values[bad]} in year {y.start_year + bad}"
        )
    d = p.values * y.values
    # A zero-yield year gives a zero dividend, which the strict index-level
    # unit would reject; such a series gets a neutral tag and log_growth will
    # refuse it later with the offending year.
    unit = Unit.INDEX_LEVEL if np.all(d > 0) else Unit.RATE_DECIMAL
    return AnnualSeries(p.start_year, d, unit, "dividend_index")


def log_spread(long_rate: AnnualSeries, short_rate: AnnualSeries) -> AnnualSeries:
    """Log ratio of long to short rates: bd(t) = ln(delta_c(t) / delta_b(t))."""
    c, b = align(long_rate, short_rate)
    for s in (c, b):
        if np.any(s.values <= 0.0):
            bad = int(np.flatnonzero(s.values <= 0.0)[0])
            raise DataError(
                f"log_spread: non-positive rate {s.values[bad]} "
                f"({s.name!r}) in year {s.start_year + bad}"
            )
    return AnnualSeries(c.start_year, np.log(c.values) - np.log(b.values),
                        Unit.LOG_VALUE, "log_spread")


def average_ilb_yield(per_maturity: list[AnnualSeries]) -> AnnualSeries:
    """Per-year mean real yield over whichever maturities trade that year.

    The output spans min(start years)..max(end years); a year inside that
    span with no series present is an error because the result must be
    gapless.
    """
    if not per_maturity:
        raise DataError("average_ilb_yield: no input series")
    lo = min(s.start_year for s in per_maturity)
    hi = max(s.end_year for s in per_maturity)
    out = np.empty(hi - lo + 1)
    for i, year in enumerate(range(lo, hi + 1)):
        vals = [s.value_in(year) for s in per_maturity if s.covers(year)]
        if not vals:
            raise DataError(f"average_ilb_yield: no maturity quoted in year {year}")
        out[i] = math.fsum(vals) / len(vals)
    return AnnualSeries(lo, out, per_maturity[0].unit, "ilb_yield")
