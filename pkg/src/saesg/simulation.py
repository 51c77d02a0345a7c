"""Seeded scenario generation, forecast fans and out-of-sample backtests.

Random number scheme
--------------------
Every normal variate is a pure function of the tuple
``(seed, path, series, year)``:

1. chain a splitmix64-style avalanche over the tuple components,
       h = mix(mix(mix(mix(seed) ^ path) ^ series_index) ^ year_index)
   where ``mix`` is the xor-shift/multiply finalizer with constants
   0x9E3779B97F4A7C15, 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB,
2. map the top 53 bits to the open interval (0, 1) as
   ``u = ((h >> 11) + 0.5) * 2**-53``,
3. apply the inverse normal CDF (``scipy.special.ndtri``).

Because the value depends only on the tuple, replays with the same seed are
bitwise identical and path-parallel execution (contiguous path blocks) is
bitwise identical to sequential execution. Integer hashing and the uniform
map are exact across platforms; the final ``ndtri``/``exp`` calls are
deterministic per platform and floating-point library build.

Cascade stepping order within a year: inflation, dividend yield, dividend
growth, long rate, short rate, real rate. The dividend step reads the
*year-start* state, so it sees last year's yield shock as the equation
requires; the merged state is assembled once per year.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import ndtri

from .errors import DataError, SimulationError
from .estimation import FitResult, OptimizerConfig
from .models import (CascadeState, ModelParams, ModelSpec, ParamSet,
                     implied_dividend_yield, step_dividend_yields,
                     step_dividends, step_ilb, step_inflation,
                     step_long_rates, step_short_rates)
from .pipeline import CascadeData, fit_cascade

SERIES_INDEX = {"inflation": 0, "dividend_yield": 1, "dividend": 2,
                "long_rate": 3, "short_rate": 4, "ilb": 5}

FAN_COLUMNS = ("q005", "q025", "q50", "q975", "q995", "mean")
_FAN_PROBS = (0.005, 0.025, 0.5, 0.975, 0.995)

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _mix(z: np.ndarray) -> np.ndarray:
    z = z + _GOLD
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def unit_normals(seed: int, path, series_index: int, year_index: int) -> np.ndarray:
    """Vectorized counter-based N(0,1) draws for an array of path ids."""
    with np.errstate(over="ignore"):
        p = np.atleast_1d(np.asarray(path)).astype(np.uint64)
        h = _mix(np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF))
        h = _mix(h ^ p)
        h = _mix(h ^ np.uint64(int(series_index) & 0xFFFFFFFFFFFFFFFF))
        h = _mix(h ^ np.uint64(int(year_index) & 0xFFFFFFFFFFFFFFFF))
    u = ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53
    return ndtri(u)


class NormalStream:
    """Per-path view over the counter-based variates."""

    def __init__(self, seed: int, path_index: int):
        self.seed = int(seed)
        self.path_index = int(path_index)

    def draw(self, series: str, year_index: int) -> float:
        return float(unit_normals(self.seed, self.path_index,
                                  SERIES_INDEX[series], year_index)[0])


def normal_stream(seed: int, path_index: int) -> NormalStream:
    return NormalStream(seed, path_index)


# ---------------------------------------------------------------------------
# Initial states
# ---------------------------------------------------------------------------

def neutral_state(param_sets: Mapping[str, ModelParams]) -> CascadeState:
    """State at the cascade's deterministic long-run point.

    All deviations are zero and levels sit at their stationary means, so the
    first simulated year's expected inflation is mu_q.
    """
    if "inflation" not in param_sets:
        raise DataError("neutral state needs the inflation parameters")
    p_q = param_sets["inflation"].params
    mu_q = p_q["mu_q"]
    state = CascadeState(delta_q_prev=mu_q, ym_prev=mu_q, dm_prev=mu_q,
                         cm_prev=mu_q, yn_prev=0.0, cn_prev=0.0,
                         eps_y_prev=0.0, eps_d_prev=0.0)
    dc_star = db_star = 0.0
    if "long_rate" in param_sets:
        mp = param_sets["long_rate"]
        real = mp.params["mu_c"]
        if mp.spec.variant == "ma_inflation":
            dc_star = mp.params["w_c"] * mu_q + real
        else:
            dc_star = real
    if "short_rate" in param_sets:
        mu_b = param_sets["short_rate"].params["mu_b"]
        state.bd_prev = mu_b
        db_star = dc_star * math.exp(-mu_b)
    if "ilb" in param_sets:
        mp = param_sets["ilb"]
        mu_r = mp.params.get("mu_r", 0.0)
        a_r = mp.params["a_r"]
        drive = mp.params.get("c_r", 0.0) * dc_star + mp.params.get("b_r", 0.0) * db_star
        state.delta_r_prev = (mu_r * (1.0 - a_r) + drive) / (1.0 - a_r)
    return state


def initial_state_from_fits(fits: Mapping[str, FitResult],
                            mode: str = "from_fit") -> CascadeState:
    """Assemble the simulation start state from fitted filter outputs.

    All fits must end in the same data year; a mismatch is an error because
    the cascade would otherwise mix states from different dates.
    """
    if mode == "neutral":
        return neutral_state({k: ModelParams(f.spec, f.params) for k, f in fits.items()})
    if mode != "from_fit":
        raise DataError(f"unknown initial-state mode {mode!r}")
    if not fits:
        raise DataError("initial_state_from_fits: no fits supplied")
    final_years = {name: f.final_year for name, f in fits.items()}
    if len(set(final_years.values())) > 1:
        raise DataError(f"fits end in different years: {final_years}")
    state = CascadeState()
    for f in fits.values():
        for key, value in f.filter_output.final_state.items():
            setattr(state, key, value)
    return state


# ---------------------------------------------------------------------------
# Scenario generation
# ---------------------------------------------------------------------------

@dataclass
class ScenarioSet:
    """Simulated annual paths, one (n_paths, horizon) array per series."""

    seed: int
    n_paths: int
    horizon: int
    series: dict[str, np.ndarray]
    first_year: int | None = None
    base_cpi: float = 100.0
    base_price: float = 100.0

    def year_labels(self) -> np.ndarray:
        if self.first_year is None:
            return np.arange(1, self.horizon + 1)
        return np.arange(self.first_year, self.first_year + self.horizon)


_REQUIRES = {"dividend": ("dividend_yield",), "short_rate": ("long_rate",)}


def _ilb_requires(spec: ModelSpec) -> tuple[str, ...]:
    needs = []
    if "c_r" in spec.param_names or "b_r" in spec.param_names:
        needs.append("long_rate")
    if "b_r" in spec.param_names:
        needs.append("short_rate")
    return tuple(needs)


def _validate_models(param_sets: Mapping[str, ModelParams]) -> None:
    if "inflation" not in param_sets:
        raise SimulationError("simulation requires the inflation model")
    for name, mp in param_sets.items():
        if name not in SERIES_INDEX:
            raise SimulationError(f"unknown series {name!r}")
        needs = _REQUIRES.get(name, ())
        if name == "ilb":
            needs = _ilb_requires(mp.spec)
        for dep in needs:
            if dep not in param_sets:
                raise SimulationError(
                    f"{name!r} cannot be simulated without {dep!r} "
                    f"(cascade dependency)")


def _broadcast_state(state: CascadeState, n: int) -> CascadeState:
    def arr(v):
        return np.full(n, v, dtype=np.float64)
    return CascadeState(**{k: arr(getattr(state, k)) for k in
                           CascadeState.__dataclass_fields__})


def _simulate_block(param_sets: Mapping[str, ModelParams], state0: CascadeState,
                    paths: np.ndarray, horizon: int, seed: int,
                    out: dict[str, np.ndarray], row0: int) -> None:
    """Fill rows [row0, row0+len(paths)) of the output arrays."""
    n = paths.size
    state = _broadcast_state(state0, n)
    has = param_sets.__contains__
    rows = slice(row0, row0 + n)
    for t in range(1, horizon + 1):
        col = t - 1
        z = {name: unit_normals(seed, paths, SERIES_INDEX[name], t)
             for name in param_sets}
        mp = param_sets["inflation"]
        dq = step_inflation(mp.params, state, z["inflation"])[0]
        s_y = s_d = s_c = s_b = s_r = None
        if has("dividend_yield"):
            mp = param_sets["dividend_yield"]
            y_model, s_y = step_dividend_yields(mp.spec, mp.params, state,
                                                dq, z["dividend_yield"])
            out["dividend_yield"][rows, col] = y_model
        if has("dividend"):
            mp = param_sets["dividend"]
            # state still holds the *previous* year's eps_y / eps_d
            dd, s_d = step_dividends(mp.spec, mp.params, state, dq, z["dividend"])
            out["dividend_growth"][rows, col] = dd
        dc = None
        if has("long_rate"):
            mp = param_sets["long_rate"]
            dc, s_c = step_long_rates(mp.spec, mp.params, state, dq, z["long_rate"])
            out["long_rate"][rows, col] = dc
        db = None
        if has("short_rate"):
            mp = param_sets["short_rate"]
            db, s_b = step_short_rates(mp.params, state, dc, z["short_rate"])
            out["short_rate"][rows, col] = db
        if has("ilb"):
            mp = param_sets["ilb"]
            dr, s_r = step_ilb(mp.spec, mp.params, state,
                               dc if dc is not None else 0.0,
                               db if db is not None else 0.0, z["ilb"])
            out["ilb_rate"][rows, col] = dr
        out["inflation"][rows, col] = dq
        state = CascadeState(
            delta_q_prev=dq,
            ym_prev=s_y.ym_prev if s_y else state.ym_prev,
            yn_prev=s_y.yn_prev if s_y else state.yn_prev,
            eps_y_prev=s_y.eps_y_prev if s_y else state.eps_y_prev,
            dm_prev=s_d.dm_prev if s_d else state.dm_prev,
            eps_d_prev=s_d.eps_d_prev if s_d else state.eps_d_prev,
            cm_prev=s_c.cm_prev if s_c else state.cm_prev,
            cn_prev=s_c.cn_prev if s_c else state.cn_prev,
            bd_prev=s_b.bd_prev if s_b else state.bd_prev,
            delta_r_prev=s_r.delta_r_prev if s_r else state.delta_r_prev,
        )


def simulate(param_sets: Mapping[str, ModelParams], initial_state: CascadeState,
             horizon: int, n_paths: int, seed: int, base_cpi: float = 100.0,
             base_price: float = 100.0, yield_scale: str = "percent",
             first_year: int | None = None, workers: int = 1) -> ScenarioSet:
    """Generate ``n_paths`` joint annual scenarios of length ``horizon``.

    Output series (per requested models): ``inflation``, ``cpi_index``,
    ``dividend_yield`` (decimal), ``dividend_growth``, ``share_price_index``,
    ``long_rate``, ``short_rate``, ``ilb_rate``. Index series start from the
    given bases at year 0 (not included in the arrays); the identities
    CPI(t) = CPI(t-1)*exp(inflation(t)) and P = D/Y hold along every path.

    ``workers`` > 1 splits paths into contiguous blocks computed on a thread
    pool; results are bitwise identical to sequential execution because each
    variate and each update depends only on its own path.
    """
    if horizon < 1 or n_paths < 1:
        raise SimulationError("horizon and n_paths must be positive")
    if yield_scale not in ("percent", "decimal"):
        raise SimulationError(f"unknown yield_scale {yield_scale!r}")
    _validate_models(param_sets)

    names = ["inflation"]
    if "dividend_yield" in param_sets:
        names.append("dividend_yield")
    if "dividend" in param_sets:
        names.append("dividend_growth")
    if "long_rate" in param_sets:
        names.append("long_rate")
    if "short_rate" in param_sets:
        names.append("short_rate")
    if "ilb" in param_sets:
        names.append("ilb_rate")
    out = {name: np.empty((n_paths, horizon)) for name in names}

    all_paths = np.arange(n_paths, dtype=np.uint64)
    if workers <= 1 or n_paths < 2 * workers:
        _simulate_block(param_sets, initial_state, all_paths, horizon, seed, out, 0)
    else:
        bounds = np.linspace(0, n_paths, workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_simulate_block, param_sets, initial_state,
                                   all_paths[lo:hi], horizon, seed, out, int(lo))
                       for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
            for fut in futures:
                fut.result()

    for name, arr in out.items():
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise SimulationError(
                f"non-finite {name} at path {int(bad[0])}, "
                f"year index {int(bad[1]) + 1}")

    series = dict(out)
    series["cpi_index"] = base_cpi * np.exp(np.cumsum(series["inflation"], axis=1))
    if "dividend_yield" in series:
        scale = 100.0 if yield_scale == "percent" else 1.0
        y_dec = series["dividend_yield"] / scale
        series["dividend_yield"] = y_dec
        if "dividend_growth" in series:
            mp = param_sets["dividend_yield"]
            y0 = implied_dividend_yield(mp.spec, mp.params, initial_state) / scale
            d_index = (base_price * y0) * np.exp(np.cumsum(series["dividend_growth"],
                                                           axis=1))
            if np.any(y_dec <= 0.0):
                raise SimulationError("simulated dividend yield hit zero")
            series["share_price_index"] = d_index / y_dec
    return ScenarioSet(seed=int(seed), n_paths=n_paths, horizon=horizon,
                       series=series, first_year=first_year,
                       base_cpi=base_cpi, base_price=base_price)


# ---------------------------------------------------------------------------
# Forecast fans
# ---------------------------------------------------------------------------

@dataclass
class FanTable:
    """Per-year quantiles and means of every simulated series."""

    years: np.ndarray
    series: dict[str, dict[str, np.ndarray]]
    n_paths: int
    levels: tuple[float, ...]


def fan(scenarios: ScenarioSet, levels: tuple[float, ...] = (0.95, 0.99)) -> FanTable:
    """Quantile fan at the 50% / 95% / 99% levels plus the per-year mean.

    Quantiles interpolate order statistics at rank p*(n+1). The extreme
    columns are meaningless on thin samples, so fewer than 1000 paths is an
    error.
    """
    for lvl in levels:
        if lvl not in (0.95, 0.99):
            raise SimulationError(f"unsupported fan level {lvl!r}")
    if scenarios.n_paths < 1000:
        raise SimulationError(
            f"fan quantiles need at least 1000 paths, got {scenarios.n_paths}")
    table: dict[str, dict[str, np.ndarray]] = {}
    for name, arr in scenarios.series.items():
        qs = np.quantile(arr, _FAN_PROBS, axis=0, method="weibull")
        cols = {col: qs[i] for i, col in enumerate(FAN_COLUMNS[:-1])}
        cols["mean"] = arr.mean(axis=0)
        table[name] = cols
    return FanTable(scenarios.year_labels(), table, scenarios.n_paths, tuple(levels))


# ---------------------------------------------------------------------------
# Backtest
# ---------------------------------------------------------------------------

@dataclass
class BacktestSeriesRow:
    year: int
    observed: float
    q005: float
    q025: float
    q50: float
    q975: float
    q995: float
    inside_95: bool
    inside_99: bool


@dataclass
class BacktestReport:
    split_year: int
    horizon: int
    n_paths: int
    seed: int
    fits: dict[str, FitResult]
    fan_table: FanTable
    rows: dict[str, list[BacktestSeriesRow]] = field(default_factory=dict)
    coverage_95: dict[str, float] = field(default_factory=dict)
    coverage_99: dict[str, float] = field(default_factory=dict)


@dataclass
class _YearValues:
    """Minimal (start_year, values) pair for rescaled observed series."""

    start_year: int
    values: np.ndarray


def _observed_holdout(data: CascadeData, split_year: int, horizon: int) -> dict:
    """Observed values over the holdout window, keyed like ScenarioSet."""
    lo, hi = split_year + 1, split_year + horizon
    out: dict[str, object] = {}

    def window(s):
        if s is None or s.end_year < lo or s.start_year > hi:
            return None
        return s.window(lo, hi)

    dq = window(data.dq)
    if dq is not None:
        out["inflation"] = dq
        # rebase the observed index to 100 at the split year
        cpi = 100.0 * np.exp(np.cumsum(data.dq.window(lo, data.dq.end_year).values))
        out["cpi_index"] = _YearValues(lo, cpi[:hi - lo + 1])
    if data.y is not None:
        y = window(data.y)
        if y is not None:
            scale = 100.0 if data.yield_scale == "percent" else 1.0
            out["dividend_yield"] = _YearValues(y.start_year, y.values / scale)
    for key, s in (("dividend_growth", data.dd), ("long_rate", data.dc),
                   ("short_rate", data.db), ("ilb_rate", data.dr)):
        w = window(s)
        if w is not None:
            out[key] = w
    return out


def backtest(data: CascadeData, specs: dict[str, ModelSpec], split_year: int,
             horizon: int = 10, n_paths: int = 100_000, seed: int = 0,
             include_ilb: bool = False, config: OptimizerConfig | None = None,
             n_starts: int = 5, ma_init: float | None = None,
             workers: int = 1) -> BacktestReport:
    """Refit through ``split_year``, simulate the holdout, score the fans.

    The real-rate model is excluded unless ``include_ilb`` (its history is
    too short for a meaningful truncated fit). Coverage is the fraction of
    observed holdout values inside the central 95% / 99% bands.
    """
    if split_year >= data.dq.end_year:
        raise DataError(
            f"split_year {split_year} leaves no holdout observations "
            f"(inflation data ends {data.dq.end_year})")
    specs_bt = {name: spec for name, spec in specs.items()
                if include_ilb or name != "ilb"}
    truncated = data.window(data.dq.start_year, split_year)
    fits = fit_cascade(specs_bt, truncated, config=config, n_starts=n_starts,
                       seed=seed, ma_init=ma_init)
    state = initial_state_from_fits(fits)
    param_sets = {name: ModelParams(f.spec, f.params) for name, f in fits.items()}
    scen = simulate(param_sets, state, horizon, n_paths, seed,
                    yield_scale=data.yield_scale, first_year=split_year + 1,
                    workers=workers)
    ftab = fan(scen)
    report = BacktestReport(split_year=split_year, horizon=horizon,
                            n_paths=n_paths, seed=int(seed), fits=fits,
                            fan_table=ftab)
    observed = _observed_holdout(data, split_year, horizon)
    for name, obs in observed.items():
        if name not in ftab.series:
            continue
        cols = ftab.series[name]
        rows = []
        for i, value in enumerate(np.asarray(obs.values)):
            year = obs.start_year + i
            j = year - (split_year + 1)
            if j < 0 or j >= horizon:
                continue
            q005, q025, q50 = cols["q005"][j], cols["q025"][j], cols["q50"][j]
            q975, q995 = cols["q975"][j], cols["q995"][j]
            rows.append(BacktestSeriesRow(
                year=year, observed=float(value), q005=float(q005),
                q025=float(q025), q50=float(q50), q975=float(q975),
                q995=float(q995),
                inside_95=bool(q025 <= value <= q975),
                inside_99=bool(q005 <= value <= q995)))
        if rows:
            report.rows[name] = rows
            report.coverage_95[name] = sum(r.inside_95 for r in rows) / len(rows)
            report.coverage_99[name] = sum(r.inside_99 for r in rows) / len(rows)
    return report
