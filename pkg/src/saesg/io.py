"""File formats: JSON parameter/fit documents, CSV tables, binary scenarios.

All writers are deterministic (no timestamps except in run manifests, stable
key order, shortest round-trip float repr), so re-running a command with the
same inputs reproduces output files byte for byte.

Binary scenario layout (all integers little-endian):

    bytes 0..5   magic b"SAESG1"
    u64          n_series
    u64          n_paths
    u64          horizon
    u64          seed
    i64          first_year (INT64_MIN when unset)
    f64          base_cpi
    f64          base_price
    per series:  u64 name length, then that many UTF-8 bytes
    per series:  n_paths * horizon float64 values, row-major (path, year)
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import struct
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import DataError
from .estimation import FitResult, StabilityTable
from .models import ModelParams, ModelSpec, ParamSet
from .simulation import BacktestReport, FanTable, ScenarioSet, FAN_COLUMNS

_MAGIC = b"SAESG1"
_NO_YEAR = -(2 ** 63)


def _jnum(v) -> float | None:
    """JSON-safe number: None for missing/non-finite (strict JSON has no NaN)."""
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def write_json(path, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, allow_nan=False)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# Parameter documents
# ---------------------------------------------------------------------------

def params_document(param_sets: Mapping[str, ModelParams]) -> dict:
    """JSON document for a set of fitted/hand-set cascade parameters."""
    models = {}
    for series, mp in param_sets.items():
        entry = {"variant": mp.spec.variant, "parameters": {}}
        if mp.spec.fixed:
            entry["fixed"] = {k: float(v) for k, v in mp.spec.fixed.items()}
        for name in mp.params.names:
            entry["parameters"][name] = {
                "value": float(mp.params[name]),
                "std_error": _jnum(mp.params.std_error(name)),
                "fixed": name in mp.params.fixed,
            }
        models[series] = entry
    return {"format": "saesg-params", "models": models}


def parse_params_document(doc: dict) -> dict[str, ModelParams]:
    if not isinstance(doc, dict) or doc.get("format") != "saesg-params":
        raise DataError("not a saesg-params document (missing format tag)")
    out: dict[str, ModelParams] = {}
    for series, entry in doc.get("models", {}).items():
        spec = ModelSpec(series, entry["variant"], dict(entry.get("fixed", {})))
        values, ses = {}, {}
        for name, p in entry["parameters"].items():
            values[name] = p["value"]
            if p.get("std_error") is not None:
                ses[name] = p["std_error"]
        pset = ParamSet.from_dict(spec, values, ses if ses else None)
        out[series] = ModelParams(spec, pset)
    return out


def save_params(path, param_sets: Mapping[str, ModelParams]) -> None:
    write_json(path, params_document(param_sets))


def load_params(path) -> dict[str, ModelParams]:
    return parse_params_document(read_json(path))


# ---------------------------------------------------------------------------
# Fit reports
# ---------------------------------------------------------------------------

def fit_report(fit: FitResult) -> dict:
    """Full JSON view of one model fit, diagnostics included."""
    res = fit.residuals
    params = {}
    for name in fit.params.names:
        params[name] = {
            "value": float(fit.params[name]),
            "std_error": _jnum(fit.params.std_error(name)),
            "fixed": name in fit.params.fixed,
        }
    return {
        "series": fit.spec.series,
        "variant": fit.spec.variant,
        "n_obs": fit.n_obs,
        "log_likelihood": _jnum(fit.log_likelihood),
        "converged": bool(fit.converged),
        "iterations": int(fit.iterations),
        "se_warning": fit.se_warning,
        "parameters": params,
        "residuals": {
            "first_year": int(res.start_year),
            "values": [float(v) for v in res.values],
            "standardized": [float(v) for v in fit.standardized_residuals.values],
        },
        "diagnostics": fit.diagnostics.as_dict(),
    }


# ---------------------------------------------------------------------------
# Stability tables
# ---------------------------------------------------------------------------

def stability_document(table: StabilityTable) -> dict:
    rows = []
    for row in table.rows:
        rec = {"period_bound_year": row.bound_year,
               "first_year": row.first_year, "last_year": row.last_year,
               "n_window": row.n_window, "converged": bool(row.converged),
               "estimates": {}, "std_errors": {}}
        for name in table.param_names:
            rec["estimates"][name] = _jnum(row.estimates.get(name))
            rec["std_errors"][name] = _jnum(row.std_errors.get(name))
        rows.append(rec)
    return {"series": table.series, "variant": table.variant,
            "direction": table.direction, "min_obs": table.min_obs,
            "warm_start": table.warm_start,
            "param_names": list(table.param_names), "rows": rows}


def _cell(v) -> str:
    if v is None:
        return ""
    v = float(v)
    return repr(v) if math.isfinite(v) else ""


def write_stability_csv(table: StabilityTable, path) -> None:
    """One row per sub-period; per-parameter estimate, SE and 95% CI bounds."""
    header = ["period_bound_year"]
    for name in table.param_names:
        header += [f"{name}_estimate", f"{name}_se",
                   f"{name}_ci_low", f"{name}_ci_high"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in table.rows:
            cells = [str(row.bound_year)]
            for name in table.param_names:
                lo, hi = table.ci_bounds(row, name)
                cells += [_cell(row.estimates.get(name)),
                          _cell(row.std_errors.get(name)), _cell(lo), _cell(hi)]
            w.writerow(cells)


# ---------------------------------------------------------------------------
# Scenario sets
# ---------------------------------------------------------------------------

def write_scenarios_csv(scen: ScenarioSet, path) -> None:
    """Long-format CSV: path, year, series, value (series-major ordering)."""
    years = scen.year_labels()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["path", "year", "series", "value"])
        for name, arr in scen.series.items():
            for p in range(scen.n_paths):
                row_vals = arr[p]
                for j in range(scen.horizon):
                    w.writerow([p, years[j], name, repr(float(row_vals[j]))])


def write_scenarios_binary(scen: ScenarioSet, path) -> None:
    names = list(scen.series)
    first = _NO_YEAR if scen.first_year is None else int(scen.first_year)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<QQQQqdd", len(names), scen.n_paths, scen.horizon,
                             scen.seed & 0xFFFFFFFFFFFFFFFF, first,
                             scen.base_cpi, scen.base_price))
        for name in names:
            raw = name.encode("utf-8")
            fh.write(struct.pack("<Q", len(raw)))
            fh.write(raw)
        for name in names:
            fh.write(np.ascontiguousarray(scen.series[name],
                                          dtype="<f8").tobytes())


def read_scenarios_binary(path) -> ScenarioSet:
    blob = Path(path).read_bytes()
    if blob[:6] != _MAGIC:
        raise DataError(f"{path}: not a scenario file (bad magic)")
    off = 6
    n_series, n_paths, horizon, seed, first, base_cpi, base_price = \
        struct.unpack_from("<QQQQqdd", blob, off)
    off += struct.calcsize("<QQQQqdd")
    names = []
    for _ in range(n_series):
        (ln,) = struct.unpack_from("<Q", blob, off)
        off += 8
        names.append(blob[off:off + ln].decode("utf-8"))
        off += ln
    series = {}
    count = n_paths * horizon
    for name in names:
        arr = np.frombuffer(blob, dtype="<f8", count=count, offset=off)
        series[name] = arr.reshape(n_paths, horizon).copy()
        off += count * 8
    if off != len(blob):
        raise DataError(f"{path}: trailing bytes after scenario data")
    return ScenarioSet(seed=int(seed), n_paths=int(n_paths), horizon=int(horizon),
                       series=series,
                       first_year=None if first == _NO_YEAR else int(first),
                       base_cpi=float(base_cpi), base_price=float(base_price))


# ---------------------------------------------------------------------------
# Fan tables and backtests
# ---------------------------------------------------------------------------

def write_fan_csv(fan: FanTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["year", "series"] + list(FAN_COLUMNS))
        for name, cols in fan.series.items():
            for j, year in enumerate(fan.years):
                w.writerow([int(year), name] +
                           [repr(float(cols[c][j])) for c in FAN_COLUMNS])


def backtest_document(report: BacktestReport) -> dict:
    series = {}
    for name, rows in report.rows.items():
        series[name] = [{
            "year": r.year, "observed": _jnum(r.observed),
            "q005": _jnum(r.q005), "q025": _jnum(r.q025), "q50": _jnum(r.q50),
            "q975": _jnum(r.q975), "q995": _jnum(r.q995),
            "inside_95": r.inside_95, "inside_99": r.inside_99,
        } for r in rows]
    return {
        "split_year": report.split_year,
        "horizon": report.horizon,
        "n_paths": report.n_paths,
        "seed": report.seed,
        "coverage_95": {k: _jnum(v) for k, v in report.coverage_95.items()},
        "coverage_99": {k: _jnum(v) for k, v in report.coverage_99.items()},
        "series": series,
        "truncated_fits": {k: fit_report(f) for k, f in report.fits.items()},
    }


# ---------------------------------------------------------------------------
# Run manifests
# ---------------------------------------------------------------------------

def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_manifest(path, command: str, seed: int | None,
                   config_path=None, outputs=(), extra: dict | None = None) -> None:
    """Record what produced a set of outputs: config hash, seed, versions,
    and a SHA-256 per output file. Only ``created_utc`` varies between
    identical re-runs."""
    import scipy

    from . import __version__

    doc: dict = {
        "command": command,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "seed": seed,
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "saesg": __version__,
        },
    }
    if config_path is not None:
        doc["config"] = {"path": str(config_path),
                         "sha256": sha256_hex(Path(config_path).read_bytes())}
    doc["outputs"] = [{"file": Path(p).name,
                       "sha256": sha256_hex(Path(p).read_bytes())}
                      for p in outputs]
    if extra:
        doc.update(extra)
    write_json(path, doc)
