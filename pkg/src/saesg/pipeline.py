"""Wiring: raw inputs -> modelled series -> per-model fits in cascade order.

The cascade needs more than per-model fitting: the dividend model consumes
the fitted dividend-yield residuals, the short-rate model consumes the long
rate, and stability/backtest runs refit upstream models per window. This
module owns those dependencies so that the estimation module can stay
ignorant of them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, DataError
from .estimation import (FitResult, OptimizerConfig, StabilityTable, fit,
                         recursive_fit)
from .models import SERIES_ORDER, FilterInputs, ModelSpec
from .series import (AnnualSeries, Unit, as_decimal, average_ilb_yield,
                     derive_dividends, force_of_inflation, log_growth,
                     log_spread, short_rate_from_index)

#: cascade order and each model's upstream fit requirement
UPSTREAM_FIT = {"dividend": "dividend_yield"}


@dataclass
class CascadeData:
    """The modelled series, aligned by year bookkeeping only (not clipped).

    ``dq`` is always required; the rest are optional depending on which
    models a run calibrates. ``y`` is expressed in ``yield_scale`` units
    ("percent" or "decimal") because the log-yield model's location
    parameter depends on the quoted scale; everything else is decimal.
    """

    dq: AnnualSeries
    y: AnnualSeries | None = None
    dd: AnnualSeries | None = None
    dc: AnnualSeries | None = None
    db: AnnualSeries | None = None
    bd: AnnualSeries | None = None
    dr: AnnualSeries | None = None
    yield_scale: str = "percent"

    def __post_init__(self):
        if self.yield_scale not in ("percent", "decimal"):
            raise ConfigError(f"yield_scale must be 'percent' or 'decimal', "
                              f"got {self.yield_scale!r}")

    def window(self, first_year: int, last_year: int) -> "CascadeData":
        """Clip every present series to the inclusive year window.

        Series that do not overlap the window at all are dropped rather
        than erroring; ``dq`` must overlap.
        """
        def clip(s: AnnualSeries | None) -> AnnualSeries | None:
            if s is None or s.end_year < first_year or s.start_year > last_year:
                return None
            return s.window(first_year, last_year)

        return CascadeData(dq=self.dq.window(first_year, last_year),
                           y=clip(self.y), dd=clip(self.dd), dc=clip(self.dc),
                           db=clip(self.db), bd=clip(self.bd), dr=clip(self.dr),
                           yield_scale=self.yield_scale)


def build_cascade_data(cpi: AnnualSeries,
                       share_price: AnnualSeries | None = None,
                       dividend_yield: AnnualSeries | None = None,
                       long_rate: AnnualSeries | None = None,
                       money_market_index: AnnualSeries | None = None,
                       ilb_yields: list[AnnualSeries] | None = None,
                       yield_scale: str = "percent") -> CascadeData:
    """Apply the deterministic transforms that precede any fitting."""
    dq = force_of_inflation(cpi)
    y = dd = dc = db = bd = dr = None
    if dividend_yield is not None:
        y_dec = as_decimal(dividend_yield)
        scale = 100.0 if yield_scale == "percent" else 1.0
        y = AnnualSeries(y_dec.start_year, y_dec.values * scale,
                         dividend_yield.unit, "dividend_yield")
        if share_price is not None:
            dd = log_growth(derive_dividends(share_price, y_dec))
    if long_rate is not None:
        dc = as_decimal(long_rate)
        dc = AnnualSeries(dc.start_year, dc.values, Unit.RATE_DECIMAL, "long_rate")
    if money_market_index is not None:
        db = short_rate_from_index(money_market_index)
        if dc is not None:
            bd = log_spread(dc, db)
    if ilb_yields:
        dr = as_decimal(average_ilb_yield(ilb_yields))
    return CascadeData(dq=dq, y=y, dd=dd, dc=dc, db=db, bd=bd, dr=dr,
                       yield_scale=yield_scale)


def modelled_series(series: str, data: CascadeData) -> AnnualSeries:
    """The series each sub-model actually fits."""
    mapping = {"inflation": data.dq, "dividend_yield": data.y,
               "dividend": data.dd, "long_rate": data.dc,
               "short_rate": data.bd, "ilb": data.dr}
    if series not in mapping:
        raise DataError(f"unknown series {series!r}")
    out = mapping[series]
    if out is None:
        needed = {"dividend_yield": "dividend yields",
                  "dividend": "share prices and dividend yields",
                  "long_rate": "long rates",
                  "short_rate": "long rates and a money market index",
                  "ilb": "index-linked bond yields"}
        raise DataError(f"no data for {series!r}; requires {needed.get(series, series)}")
    return out


def filter_inputs(series: str, data: CascadeData,
                  eps_y: AnnualSeries | None = None) -> FilterInputs:
    primary = modelled_series(series, data)
    if series in ("dividend_yield", "long_rate"):
        return FilterInputs(primary=primary, dq=data.dq)
    if series == "dividend":
        return FilterInputs(primary=primary, dq=data.dq, eps_y=eps_y)
    if series == "ilb":
        return FilterInputs(primary=primary, dc=data.dc, db=data.db)
    return FilterInputs(primary=primary)


def fit_cascade(specs: dict[str, ModelSpec], data: CascadeData,
                config: OptimizerConfig | None = None, n_starts: int = 5,
                seed: int = 0, ma_init: float | None = None
                ) -> dict[str, FitResult]:
    """Fit the requested sub-models in cascade order.

    Raises :class:`DataError` when a requested model's upstream fit is not
    also requested (the dividend equation needs the fitted yield residuals).
    """
    for series in specs:
        up = UPSTREAM_FIT.get(series)
        if up is not None and up not in specs:
            raise DataError(
                f"cannot fit {series!r} without {up!r}: the cascade feeds its "
                f"lagged residuals into the {series} equation")
    results: dict[str, FitResult] = {}
    for series in SERIES_ORDER:
        if series not in specs:
            continue
        spec = specs[series]
        if spec.series != series:
            raise ConfigError(f"spec for {series!r} is labelled {spec.series!r}")
        eps_y = results["dividend_yield"].residuals if series == "dividend" else None
        inputs = filter_inputs(series, data, eps_y=eps_y)
        results[series] = fit(spec, inputs, config=config, n_starts=n_starts,
                              seed=seed, ma_init=ma_init)
    return results


def stability(series: str, specs: dict[str, ModelSpec], data: CascadeData,
              direction: str, min_obs: int,
              config: OptimizerConfig | None = None, n_starts: int = 5,
              seed: int = 0, warm_start: bool = True,
              ma_init: float | None = None) -> StabilityTable:
    """Recursive sub-period fits for one model.

    Windows are defined on the modelled series' own years. Models with an
    upstream dependency refit that upstream model inside each window, so a
    sub-period fit never sees information from outside its window.
    """
    if series not in specs:
        raise ConfigError(f"no model spec configured for {series!r}")
    spec = specs[series]
    primary = modelled_series(series, data)
    up = UPSTREAM_FIT.get(series)
    if up is not None and up not in specs:
        raise DataError(f"stability of {series!r} needs a spec for {up!r}")

    def window_inputs(lo: int, hi: int) -> FilterInputs:
        sub = data.window(lo, hi)
        eps_y = None
        if up is not None:
            up_fit = fit(specs[up], filter_inputs(up, sub), config=config,
                         n_starts=n_starts, seed=seed, ma_init=ma_init)
            eps_y = up_fit.residuals
        return filter_inputs(series, sub, eps_y=eps_y)

    return recursive_fit(spec, window_inputs,
                         (primary.start_year, primary.end_year), direction,
                         min_obs, config=config, n_starts=n_starts, seed=seed,
                         warm_start=warm_start, ma_init=ma_init)
