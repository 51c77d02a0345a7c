"""The six-equation annual cascade: filters and one-year step functions.

Structure
---------
White noise enters each sub-model only through its own shock; all other
dependence flows down the cascade:

    inflation -> dividend yield -> dividend growth
    inflation -> long rate -> short rate -> index-linked real rate

Each sub-model comes as an exact inverse pair:

* ``filter_*``   turns observed data plus parameters into one-step-ahead
  residuals (conditioning on the first usable observation, so a series of n
  observations yields n - 1 residuals) and records latent state traces.
* ``step_*``     advances the model one year from a :class:`CascadeState`
  given the upstream same-year values and a unit normal shock.

Feeding a filter's residuals (as shocks eps/sigma) back through the step
functions reproduces the observed series to float round-off; tests pin this
at 1e-12 relative.

Equations (ASCII):

    inflation        dq(t) = mu_q + a_q*(dq(t-1) - mu_q) + sigma_q*z
    dividend yield   ym(t) = d_y*dq(t) + (1-d_y)*ym(t-1)
                     yq(t) = w_y*ym(t) + (1-w_y)*dq(t)          [ma_inflation]
                     ln y(t) = yq(t) + mu_y + yn(t)             [yq = 0 for ar1]
                     yn(t) = a_y*yn(t-1) + eps_y(t)
    dividend growth  dm(t) = d_d*dq(t) + (1-d_d)*dm(t-1)
                     dqx(t) = w_d*dm(t) + (1-w_d)*dq(t)         [ma_inflation]
                     dqx(t) = q_d*dq(t)                         [simultaneous_inflation]
                     dqx(t) = 0                                 [yield_only]
                     dd(t) = dqx(t) + mu_d + y_d*eps_y(t-1) + k_d*eps_d(t-1) + eps_d(t)
    long rate        cm(t) = d_c*dq(t) + (1-d_c)*cm(t-1)
                     dc(t) = w_c*cm(t) + exp(ln mu_c + cn(t))   [ma_inflation]
                     dc(t) = exp(ln mu_c + cn(t))               [ar1_log]
                     cn(t) = a_c*cn(t-1) + eps_c(t)
    short rate       bd(t) = mu_b + a_b*(bd(t-1) - mu_b) + eps_b(t)
                     db(t) = dc(t)*exp(-bd(t))
    index-linked     dr(t) = mu_r + a_r*(dr(t-1) - mu_r) + c_r*dc(t) + b_r*db(t) + eps_r(t)
                     (inactive terms dropped per variant)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np
from scipy.signal import lfilter

from .errors import DataError, FilterError
from .series import AnnualSeries, Unit, align

SERIES_ORDER = ("inflation", "dividend_yield", "dividend",
                "long_rate", "short_rate", "ilb")

# Canonical parameter layout per (series, variant).
VARIANT_PARAMS: dict[tuple[str, str], tuple[str, ...]] = {
    ("inflation", "ar1"): ("mu_q", "a_q", "sigma_q"),
    ("dividend_yield", "ar1"): ("mu_y", "a_y", "sigma_y"),
    ("dividend_yield", "ma_inflation"): ("w_y", "d_y", "mu_y", "a_y", "sigma_y"),
    ("dividend", "yield_only"): ("mu_d", "y_d", "k_d", "sigma_d"),
    ("dividend", "simultaneous_inflation"): ("q_d", "mu_d", "y_d", "k_d", "sigma_d"),
    ("dividend", "ma_inflation"): ("w_d", "d_d", "mu_d", "y_d", "k_d", "sigma_d"),
    ("long_rate", "ar1_log"): ("mu_c", "a_c", "sigma_c"),
    ("long_rate", "ma_inflation"): ("w_c", "d_c", "mu_c", "a_c", "sigma_c"),
    ("short_rate", "ar1_spread"): ("mu_b", "a_b", "sigma_b"),
    ("ilb", "ar1"): ("mu_r", "a_r", "sigma_r"),
    ("ilb", "both_rates"): ("mu_r", "a_r", "c_r", "b_r", "sigma_r"),
    ("ilb", "long_only"): ("mu_r", "a_r", "c_r", "sigma_r"),
    ("ilb", "short_with_mean"): ("mu_r", "a_r", "b_r", "sigma_r"),
    ("ilb", "short_no_mean"): ("a_r", "b_r", "sigma_r"),
}

#: parameters that must stay inside (-1, 1) for a stationary fit
AR_COEFFICIENTS = frozenset({"a_q", "a_y", "k_d", "a_c", "a_b", "a_r"})
#: parameters that must be strictly positive
POSITIVE_PARAMS = frozenset({"sigma_q", "sigma_y", "sigma_d", "sigma_c",
                             "sigma_b", "sigma_r", "mu_c"})


def variants_for(series: str) -> tuple[str, ...]:
    return tuple(v for (s, v) in VARIANT_PARAMS if s == series)


@dataclass
class ModelSpec:
    """Which sub-model and variant to use, plus parameters frozen by fiat.

    ``fixed`` maps parameter names to values that the optimizer must not
    move (e.g. ``{"w_c": 1.0, "d_c": 0.13}`` for the long-rate model).
    """

    series: str
    variant: str
    fixed: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        key = (self.series, self.variant)
        if key not in VARIANT_PARAMS:
            known = variants_for(self.series)
            if not known:
                raise DataError(f"unknown series {self.series!r}")
            raise DataError(
                f"unknown variant {self.variant!r} for {self.series!r}; "
                f"choose from {known}"
            )
        for name in self.fixed:
            if name not in VARIANT_PARAMS[key]:
                raise DataError(
                    f"fixed parameter {name!r} not in {self.series}/{self.variant} "
                    f"parameter set {VARIANT_PARAMS[key]}"
                )

    @property
    def param_names(self) -> tuple[str, ...]:
        return VARIANT_PARAMS[(self.series, self.variant)]

    @property
    def sigma_name(self) -> str:
        return next(n for n in self.param_names if n.startswith("sigma_"))

    @property
    def free_names(self) -> tuple[str, ...]:
        return tuple(n for n in self.param_names if n not in self.fixed)


@dataclass
class ParamSet:
    """Ordered parameter values for one model, with optional standard errors."""

    names: tuple[str, ...]
    values: np.ndarray
    std_errors: np.ndarray | None = None
    fixed: frozenset = frozenset()

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.names),):
            raise DataError("ParamSet: values do not match names")
        if self.std_errors is not None:
            self.std_errors = np.asarray(self.std_errors, dtype=np.float64)
            if self.std_errors.shape != self.values.shape:
                raise DataError("ParamSet: std_errors do not match names")
        self.fixed = frozenset(self.fixed)

    @classmethod
    def from_dict(cls, spec: ModelSpec, mapping: Mapping[str, float],
                  std_errors: Mapping[str, float] | None = None) -> "ParamSet":
        missing = [n for n in spec.param_names if n not in mapping]
        if missing:
            raise DataError(f"{spec.series}/{spec.variant}: missing parameters {missing}")
        vals = np.array([float(mapping[n]) for n in spec.param_names])
        ses = None
        if std_errors is not None:
            ses = np.array([float(std_errors.get(n, np.nan)) for n in spec.param_names])
        return cls(spec.param_names, vals, ses, frozenset(spec.fixed))

    def __getitem__(self, name: str) -> float:
        try:
            return float(self.values[self.names.index(name)])
        except ValueError:
            raise KeyError(name) from None

    def get(self, name: str, default: float = 0.0) -> float:
        return self[name] if name in self.names else default

    def std_error(self, name: str) -> float | None:
        if self.std_errors is None:
            return None
        se = float(self.std_errors[self.names.index(name)])
        return None if math.isnan(se) else se

    def as_dict(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.names, self.values)}


@dataclass
class ModelParams:
    """A spec together with a concrete parameter point (fit or hand-set)."""

    spec: ModelSpec
    params: ParamSet


def params_violation(spec: ModelSpec, params: ParamSet | Mapping[str, float]) -> str | None:
    """Reason the parameter point is outside the model's domain, or None."""
    get = params.__getitem__
    for name in spec.param_names:
        v = get(name)
        if not math.isfinite(v):
            return f"{name} is not finite"
        if name in POSITIVE_PARAMS and v <= 0.0:
            return f"{name} must be > 0, got {v}"
        if name in AR_COEFFICIENTS and not (-1.0 < v < 1.0):
            return f"{name} must lie in (-1, 1), got {v}"
    return None


@dataclass
class CascadeState:
    """Latent state carried across years; every field may be a scalar or a
    per-path array during simulation.

    ``eps_y_prev``/``eps_d_prev`` hold the *previous* year's shocks; the
    dividend step must therefore read its state before the same-year yield
    update is merged in (the cascade driver in :mod:`saesg.simulation` does
    this).
    """

    delta_q_prev: float | np.ndarray = 0.0
    ym_prev: float | np.ndarray = 0.0
    yn_prev: float | np.ndarray = 0.0
    eps_y_prev: float | np.ndarray = 0.0
    dm_prev: float | np.ndarray = 0.0
    eps_d_prev: float | np.ndarray = 0.0
    cm_prev: float | np.ndarray = 0.0
    cn_prev: float | np.ndarray = 0.0
    bd_prev: float | np.ndarray = 0.0
    delta_r_prev: float | np.ndarray = 0.0


@dataclass
class FilterOutput:
    """Residuals and state traces produced by filtering observed data."""

    residuals: AnnualSeries
    states: dict[str, AnnualSeries]
    final_state: dict[str, float]
    final_year: int

    @property
    def n_obs(self) -> int:
        return len(self.residuals)


def _ma_level(x: np.ndarray, d: float, init: float) -> np.ndarray:
    """m(0) = init; m(t) = d*x(t) + (1-d)*m(t-1) for t >= 1."""
    if x.size == 1:
        return np.array([init])
    tail, _ = lfilter([d], [1.0, -(1.0 - d)], x[1:], zi=[(1.0 - d) * init])
    return np.concatenate(([init], tail))


def _check_min_len(series: AnnualSeries, what: str) -> None:
    if len(series) < 2:
        raise DataError(f"{what}: need at least 2 observations, got {len(series)}")


# ---------------------------------------------------------------------------
# Inflation
# ---------------------------------------------------------------------------

def filter_inflation(params: ParamSet, dq: AnnualSeries) -> FilterOutput:
    """Residuals of the AR(1) force of inflation, conditioning on dq(t0)."""
    _check_min_len(dq, "filter_inflation")
    x = dq.values
    mu, a = params["mu_q"], params["a_q"]
    eps = x[1:] - mu - a * (x[:-1] - mu)
    res = AnnualSeries(dq.start_year + 1, eps, Unit.RATE_DECIMAL, "eps_q")
    return FilterOutput(res, {}, {"delta_q_prev": float(x[-1])}, dq.end_year)


def step_inflation(params: ParamSet, state: CascadeState, z) -> tuple:
    dq = params["mu_q"] + params["a_q"] * (state.delta_q_prev - params["mu_q"]) \
        + params["sigma_q"] * z
    return dq, replace(state, delta_q_prev=dq)


# ---------------------------------------------------------------------------
# Dividend yields
# ---------------------------------------------------------------------------

def filter_dividend_yields(spec: ModelSpec, params: ParamSet, y: AnnualSeries,
                           dq: AnnualSeries | None,
                           ma_init: float | None = None) -> FilterOutput:
    """Residuals of the log dividend-yield model.

    ``y`` must be strictly positive. For the ma_inflation variant ``dq`` is
    aligned to ``y`` and the smoothed level ym starts at the first aligned
    inflation value unless ``ma_init`` overrides it.
    """
    if spec.variant == "ma_inflation":
        if dq is None:
            raise DataError("dividend_yield/ma_inflation needs the inflation series")
        y, dq = align(y, dq)
    _check_min_len(y, "filter_dividend_yields")
    v = y.values
    if np.any(v <= 0.0):
        bad = int(np.flatnonzero(v <= 0.0)[0])
        raise FilterError(
            f"dividend yield must be positive to take logs, got {v[bad]} "
            f"in year {y.start_year + bad}", year=y.start_year + bad)
    ln_y = np.log(v)
    states: dict[str, AnnualSeries] = {}
    if spec.variant == "ma_inflation":
        q = dq.values
        ym = _ma_level(q, params["d_y"], q[0] if ma_init is None else ma_init)
        yq = params["w_y"] * ym + (1.0 - params["w_y"]) * q
        states["ym"] = AnnualSeries(y.start_year, ym, Unit.RATE_DECIMAL, "ym")
        ym_last = float(ym[-1])
    else:
        yq = np.zeros_like(ln_y)
        ym_last = 0.0
    yn = ln_y - yq - params["mu_y"]
    eps = yn[1:] - params["a_y"] * yn[:-1]
    states["yn"] = AnnualSeries(y.start_year, yn, Unit.LOG_VALUE, "yn")
    res = AnnualSeries(y.start_year + 1, eps, Unit.LOG_VALUE, "eps_y")
    final = {"ym_prev": ym_last, "yn_prev": float(yn[-1]), "eps_y_prev": float(eps[-1])}
    return FilterOutput(res, states, final, y.end_year)


def step_dividend_yields(spec: ModelSpec, params: ParamSet, state: CascadeState,
                         delta_q_now, z) -> tuple:
    eps = params["sigma_y"] * z
    yn = params["a_y"] * state.yn_prev + eps
    if spec.variant == "ma_inflation":
        ym = params["d_y"] * delta_q_now + (1.0 - params["d_y"]) * state.ym_prev
        yq = params["w_y"] * ym + (1.0 - params["w_y"]) * delta_q_now
    else:
        ym = state.ym_prev
        yq = 0.0
    y = np.exp(yq + params["mu_y"] + yn)
    return y, replace(state, ym_prev=ym, yn_prev=yn, eps_y_prev=eps)


def implied_dividend_yield(spec: ModelSpec, params: ParamSet, state: CascadeState):
    """The yield level the state already embodies (the year-0 observation).

    After filtering, ln y(t0) = yq(t0) + mu_y + yn(t0) holds exactly, so
    reconstructing it from (ym_prev, yn_prev, delta_q_prev) recovers the
    last observed yield; in a neutral state it gives the long-run level.
    """
    if spec.variant == "ma_inflation":
        yq = params["w_y"] * state.ym_prev + (1.0 - params["w_y"]) * state.delta_q_prev
    else:
        yq = 0.0
    return np.exp(yq + params["mu_y"] + state.yn_prev)


# ---------------------------------------------------------------------------
# Dividend growth
# ---------------------------------------------------------------------------

def _dividend_inflation_term(spec: ModelSpec, params: ParamSet, q: np.ndarray,
                             ma_init: float | None
                             ) -> tuple[np.ndarray, np.ndarray | None]:
    """Per-year inflation transmission dqx(t), plus the dm trace if any."""
    if spec.variant == "ma_inflation":
        dm = _ma_level(q, params["d_d"], q[0] if ma_init is None else ma_init)
        return params["w_d"] * dm + (1.0 - params["w_d"]) * q, dm
    if spec.variant == "simultaneous_inflation":
        return params["q_d"] * q, None
    return np.zeros_like(q), None


def filter_dividends(spec: ModelSpec, params: ParamSet, dd: AnnualSeries,
                     dq: AnnualSeries | None, eps_y: AnnualSeries | None,
                     ma_init: float | None = None) -> FilterOutput:
    """Residuals of the dividend growth model.

    ``eps_y`` is the residual series of the fitted dividend-yield model: the
    equation uses last year's yield shock. Years before the start of
    ``eps_y`` (and the seed year itself) contribute a zero shock, and the
    lagged dividend shock at the first observation is seeded to zero.
    """
    if spec.variant in ("ma_inflation", "simultaneous_inflation"):
        if dq is None:
            raise DataError(f"dividend/{spec.variant} needs the inflation series")
        dd, dq = align(dd, dq)
        q = dq.values
    else:
        q = np.zeros(len(dd))
    _check_min_len(dd, "filter_dividends")
    x = dd.values
    n = len(x)
    dqx, dm = _dividend_inflation_term(spec, params, q, ma_init)
    lagged_eps_y = np.zeros(n)
    if eps_y is not None:
        for i in range(1, n):
            year = dd.start_year + i - 1
            if eps_y.covers(year):
                lagged_eps_y[i] = eps_y.value_in(year)
    core = x - dqx - params["mu_d"] - params["y_d"] * lagged_eps_y
    # eps_d(t) = core(t) - k_d*eps_d(t-1), seeded with eps_d = 0 at the
    # first observation, residuals from the second observation on.
    eps, _ = lfilter([1.0], [1.0, params["k_d"]], core[1:], zi=[0.0])
    res = AnnualSeries(dd.start_year + 1, eps, Unit.RATE_DECIMAL, "eps_d")
    states: dict[str, AnnualSeries] = {}
    if dm is not None:
        states["dm"] = AnnualSeries(dd.start_year, dm, Unit.RATE_DECIMAL, "dm")
    final = {"dm_prev": float(dm[-1]) if dm is not None else 0.0,
             "eps_d_prev": float(eps[-1])}
    return FilterOutput(res, states, final, dd.end_year)


def step_dividends(spec: ModelSpec, params: ParamSet, state: CascadeState,
                   delta_q_now, z) -> tuple:
    """One year of dividend growth.

    ``state.eps_y_prev`` and ``state.eps_d_prev`` must be the *previous*
    year's shocks, i.e. the state captured before this year's yield update.
    """
    if spec.variant == "ma_inflation":
        dm = params["d_d"] * delta_q_now + (1.0 - params["d_d"]) * state.dm_prev
        dqx = params["w_d"] * dm + (1.0 - params["w_d"]) * delta_q_now
    elif spec.variant == "simultaneous_inflation":
        dm = state.dm_prev
        dqx = params["q_d"] * delta_q_now
    else:
        dm = state.dm_prev
        dqx = 0.0
    eps = params["sigma_d"] * z
    dd = dqx + params["mu_d"] + params["y_d"] * state.eps_y_prev \
        + params["k_d"] * state.eps_d_prev + eps
    return dd, replace(state, dm_prev=dm, eps_d_prev=eps)


def share_price(dividend, dividend_yield):
    """Price level implied by the identity P = D / Y (Y a decimal rate)."""
    y = np.asarray(dividend_yield, dtype=np.float64)
    if np.any(y <= 0.0):
        raise DataError("share_price: dividend yield must be strictly positive")
    out = np.asarray(dividend, dtype=np.float64) / y
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Long rates
# ---------------------------------------------------------------------------

def filter_long_rates(spec: ModelSpec, params: ParamSet, dc: AnnualSeries,
                      dq: AnnualSeries | None,
                      ma_init: float | None = None) -> FilterOutput:
    """Residuals of the long-rate model.

    ma_inflation: the real component cr(t) = dc(t) - w_c*cm(t) must be
    strictly positive (its log is taken); violations raise
    :class:`FilterError` naming the year. ar1_log: AR(1) on ln dc(t) around
    ln mu_c.
    """
    if spec.variant == "ma_inflation":
        if dq is None:
            raise DataError("long_rate/ma_inflation needs the inflation series")
        dc, dq = align(dc, dq)
    _check_min_len(dc, "filter_long_rates")
    x = dc.values
    states: dict[str, AnnualSeries] = {}
    if spec.variant == "ma_inflation":
        q = dq.values
        cm = _ma_level(q, params["d_c"], q[0] if ma_init is None else ma_init)
        cr = x - params["w_c"] * cm
        if np.any(cr <= 0.0):
            bad = int(np.flatnonzero(cr <= 0.0)[0])
            raise FilterError(
                f"real long-rate component is non-positive ({cr[bad]:.6g}) "
                f"in year {dc.start_year + bad}", year=dc.start_year + bad)
        states["cm"] = AnnualSeries(dc.start_year, cm, Unit.RATE_DECIMAL, "cm")
        cm_last = float(cm[-1])
    else:
        if np.any(x <= 0.0):
            bad = int(np.flatnonzero(x <= 0.0)[0])
            raise FilterError(
                f"long rate must be positive to take logs, got {x[bad]} "
                f"in year {dc.start_year + bad}", year=dc.start_year + bad)
        cr = x
        cm_last = 0.0
    cn = np.log(cr) - np.log(params["mu_c"])
    eps = cn[1:] - params["a_c"] * cn[:-1]
    states["cn"] = AnnualSeries(dc.start_year, cn, Unit.LOG_VALUE, "cn")
    res = AnnualSeries(dc.start_year + 1, eps, Unit.LOG_VALUE, "eps_c")
    final = {"cm_prev": cm_last, "cn_prev": float(cn[-1])}
    return FilterOutput(res, states, final, dc.end_year)


def step_long_rates(spec: ModelSpec, params: ParamSet, state: CascadeState,
                    delta_q_now, z) -> tuple:
    cn = params["a_c"] * state.cn_prev + params["sigma_c"] * z
    real = np.exp(np.log(params["mu_c"]) + cn)
    if spec.variant == "ma_inflation":
        cm = params["d_c"] * delta_q_now + (1.0 - params["d_c"]) * state.cm_prev
        dc = params["w_c"] * cm + real
    else:
        cm = state.cm_prev
        dc = real
    return dc, replace(state, cm_prev=cm, cn_prev=cn)


# ---------------------------------------------------------------------------
# Short rates
# ---------------------------------------------------------------------------

def filter_short_rates(params: ParamSet, bd: AnnualSeries) -> FilterOutput:
    """Residuals of the AR(1) log spread bd(t) = ln(dc/db)."""
    _check_min_len(bd, "filter_short_rates")
    x = bd.values
    mu, a = params["mu_b"], params["a_b"]
    eps = x[1:] - mu - a * (x[:-1] - mu)
    res = AnnualSeries(bd.start_year + 1, eps, Unit.LOG_VALUE, "eps_b")
    return FilterOutput(res, {}, {"bd_prev": float(x[-1])}, bd.end_year)


def step_short_rates(params: ParamSet, state: CascadeState, delta_c_now, z) -> tuple:
    bd = params["mu_b"] + params["a_b"] * (state.bd_prev - params["mu_b"]) \
        + params["sigma_b"] * z
    db = delta_c_now * np.exp(-bd)
    return db, replace(state, bd_prev=bd)


# ---------------------------------------------------------------------------
# Index-linked real rates
# ---------------------------------------------------------------------------

def filter_ilb(spec: ModelSpec, params: ParamSet, dr: AnnualSeries,
               dc: AnnualSeries | None, db: AnnualSeries | None) -> FilterOutput:
    """Residuals of the real-rate model; nominal-rate terms per variant."""
    uses_long = "c_r" in spec.param_names
    uses_short = "b_r" in spec.param_names
    to_align = [dr]
    if uses_long:
        if dc is None:
            raise DataError(f"ilb/{spec.variant} needs the long-rate series")
        to_align.append(dc)
    if uses_short:
        if db is None:
            raise DataError(f"ilb/{spec.variant} needs the short-rate series")
        to_align.append(db)
    aligned = align(*to_align)
    dr = aligned[0]
    _check_min_len(dr, "filter_ilb")
    x = dr.values
    reg = np.zeros(len(dr))
    idx = 1
    if uses_long:
        reg = reg + params["c_r"] * aligned[idx].values
        idx += 1
    if uses_short:
        reg = reg + params["b_r"] * aligned[idx].values
    mu = params.get("mu_r", 0.0)
    a = params["a_r"]
    eps = x[1:] - mu - a * (x[:-1] - mu) - reg[1:]
    res = AnnualSeries(dr.start_year + 1, eps, Unit.RATE_DECIMAL, "eps_r")
    return FilterOutput(res, {}, {"delta_r_prev": float(x[-1])}, dr.end_year)


def step_ilb(spec: ModelSpec, params: ParamSet, state: CascadeState,
             delta_c_now, delta_b_now, z) -> tuple:
    mu = params.get("mu_r", 0.0)
    dr = mu + params["a_r"] * (state.delta_r_prev - mu) \
        + params.get("c_r", 0.0) * delta_c_now \
        + params.get("b_r", 0.0) * delta_b_now \
        + params["sigma_r"] * z
    return dr, replace(state, delta_r_prev=dr)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

@dataclass
class FilterInputs:
    """Aligned input series for one sub-model's filter.

    ``primary`` is the modelled series (dq, y, dd, dc, bd or dr); the other
    fields carry whatever upstream series the variant needs.
    """

    primary: AnnualSeries
    dq: AnnualSeries | None = None
    eps_y: AnnualSeries | None = None
    dc: AnnualSeries | None = None
    db: AnnualSeries | None = None


def run_filter(spec: ModelSpec, params: ParamSet, inputs: FilterInputs,
               ma_init: float | None = None) -> FilterOutput:
    """Route to the right ``filter_*`` for ``spec``."""
    s = spec.series
    if s == "inflation":
        return filter_inflation(params, inputs.primary)
    if s == "dividend_yield":
        return filter_dividend_yields(spec, params, inputs.primary, inputs.dq, ma_init)
    if s == "dividend":
        return filter_dividends(spec, params, inputs.primary, inputs.dq,
                                inputs.eps_y, ma_init)
    if s == "long_rate":
        return filter_long_rates(spec, params, inputs.primary, inputs.dq, ma_init)
    if s == "short_rate":
        return filter_short_rates(params, inputs.primary)
    if s == "ilb":
        return filter_ilb(spec, params, inputs.primary, inputs.dc, inputs.db)
    raise DataError(f"unknown series {s!r}")
