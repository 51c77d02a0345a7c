"""Cascade calibration and simulation engine for annual investment series.

The package models six linked annual series (force of inflation, dividend
yield, dividend growth, long bond yield, short rate, index-linked real
yield) as a cascade: each equation depends on its own past and on the series
above it, with inflation at the root. It provides maximum-likelihood
calibration with residual diagnostics, recursive parameter-stability fits,
and deterministic Monte Carlo scenario generation with forecast fans and
out-of-sample backtests.
"""

from .config import RunConfig, load_config, load_input_data
from .diagnostics import (DiagnosticsReport, KpssResult, acf,
                          central_moments, jarque_bera,
                          jarque_bera_from_moments, kpss_level,
                          residual_report)
from .errors import (ConfigError, DataError, FilterError, FitError,
                     SaesgError, SimulationError)
from .estimation import (FitResult, OptimizerConfig, StabilityRow,
                         StabilityTable, fit, moment_start, nelder_mead,
                         neg_log_likelihood, recursive_fit, standard_errors)
from .models import (AR_COEFFICIENTS, SERIES_ORDER, VARIANT_PARAMS,
                     CascadeState, FilterInputs, FilterOutput, ModelParams,
                     ModelSpec, ParamSet, params_violation, run_filter,
                     share_price, variants_for)
from .pipeline import (CascadeData, build_cascade_data, fit_cascade,
                       filter_inputs, modelled_series, stability)
from .series import (AnnualSeries, Unit, align, as_decimal, average_ilb_yield,
                     derive_dividends, force_of_inflation, load_multi_series,
                     load_series, log_growth, log_spread,
                     short_rate_from_index)
from .simulation import (BacktestReport, FanTable, ScenarioSet, backtest,
                         fan, initial_state_from_fits, neutral_state,
                         normal_stream, simulate, unit_normals)

__version__ = "0.1.0"

__all__ = [
    "AnnualSeries", "Unit", "align", "as_decimal", "average_ilb_yield",
    "derive_dividends", "force_of_inflation", "load_multi_series",
    "load_series", "log_growth", "log_spread", "short_rate_from_index",
    "SERIES_ORDER", "VARIANT_PARAMS", "AR_COEFFICIENTS", "CascadeState",
    "FilterInputs", "FilterOutput", "ModelParams", "ModelSpec", "ParamSet",
    "params_violation", "run_filter", "share_price", "variants_for",
    "DiagnosticsReport", "KpssResult", "acf", "central_moments",
    "jarque_bera", "jarque_bera_from_moments", "kpss_level", "residual_report",
    "FitResult", "OptimizerConfig", "StabilityRow", "StabilityTable", "fit",
    "moment_start", "nelder_mead", "neg_log_likelihood", "recursive_fit",
    "standard_errors",
    "CascadeData", "build_cascade_data", "fit_cascade", "filter_inputs",
    "modelled_series", "stability",
    "BacktestReport", "FanTable", "ScenarioSet", "backtest", "fan",
    "initial_state_from_fits", "neutral_state", "normal_stream", "simulate",
    "unit_normals",
    "RunConfig", "load_config", "load_input_data",
    "SaesgError", "ConfigError", "DataError", "FilterError", "FitError",
    "SimulationError",
    "__version__",
]
