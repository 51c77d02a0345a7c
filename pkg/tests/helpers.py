"""Shared builders for the test suite: hand-set parameter points anchored to
published estimates, and synthetic raw-data histories generated by the
engine's own simulator (so round trips exercise the real transform chain)."""

import numpy as np

from saesg import (AnnualSeries, ModelSpec, ParamSet, Unit,
                   build_cascade_data, neutral_state, simulate)
from saesg.models import ModelParams

INFLATION_PARAMS = {"mu_q": 0.0809, "a_q": 0.8433, "sigma_q": 0.0220}
YIELD_MA_PARAMS = {"w_y": -4.0074, "d_y": 0.1396, "mu_y": 0.3781,
                   "a_y": 0.6318, "sigma_y": 0.1973}
YIELD_AR1_PARAMS = {"mu_y": 1.2695, "a_y": 0.8266, "sigma_y": 0.2261}
DIVIDEND_MA_PARAMS = {"w_d": -5.5068, "d_d": 0.6499, "mu_d": 0.0649,
                      "y_d": -0.1850, "k_d": 0.2798, "sigma_d": 0.1086}
LONG_AR1_LOG_PARAMS = {"mu_c": 0.1174, "a_c": 0.9328, "sigma_c": 0.0115}
LONG_MA_PARAMS = {"w_c": 1.0, "d_c": 0.13, "mu_c": 0.033720,
                  "a_c": 0.5665, "sigma_c": 0.3610}
SHORT_PARAMS = {"mu_b": 0.1568, "a_b": 0.5527, "sigma_b": 0.1996}
ILB_AR1_PARAMS = {"mu_r": 0.0222, "a_r": 0.7194, "sigma_r": 0.0033}
ILB_SHORT_PARAMS = {"a_r": 0.6165, "b_r": 0.1144, "sigma_r": 0.0030}


def model_params(series, variant, values, fixed=None):
    spec = ModelSpec(series, variant, dict(fixed or {}))
    return ModelParams(spec, ParamSet.from_dict(spec, values))


def cascade_params(long_variant="ar1_log"):
    """Full six-model parameter point used for synthetic data generation.

    The long-rate model defaults to the pure log-AR(1) variant: on short
    synthetic samples the inflation-tracking variant's positivity condition
    (nominal rate above its own smoothed-inflation level in every year) is
    routinely violated, which is a property of that model, not a bug.
    """
    out = {
        "inflation": model_params("inflation", "ar1", INFLATION_PARAMS),
        "dividend_yield": model_params("dividend_yield", "ma_inflation",
                                       YIELD_MA_PARAMS),
        "dividend": model_params("dividend", "ma_inflation", DIVIDEND_MA_PARAMS),
        "short_rate": model_params("short_rate", "ar1_spread", SHORT_PARAMS),
        "ilb": model_params("ilb", "short_no_mean", ILB_SHORT_PARAMS),
    }
    if long_variant == "ar1_log":
        out["long_rate"] = model_params("long_rate", "ar1_log", LONG_AR1_LOG_PARAMS)
    else:
        out["long_rate"] = model_params("long_rate", "ma_inflation",
                                        LONG_MA_PARAMS,
                                        fixed={"w_c": 1.0, "d_c": 0.13})
    return out


def simulate_paths(params, n_years, n_paths, seed, first_year=1951):
    """Joint synthetic paths from the given cascade parameter point."""
    state = neutral_state(params)
    return simulate(params, state, horizon=n_years, n_paths=n_paths, seed=seed,
                    yield_scale="percent", first_year=first_year)


def raw_series_from_path(path, first_year, ilb_from=None):
    """Reconstruct raw input series (indices, quoted yields) from one path.

    ``path`` maps series name -> 1-D array. Index series get a base year at
    ``first_year - 1`` so the log-difference transforms recover the path.
    """
    n = len(path["inflation"])
    cpi = AnnualSeries(first_year - 1, np.concatenate(([100.0], path["cpi_index"])),
                       Unit.INDEX_LEVEL, "cpi")
    out = {"cpi": cpi}
    if "share_price_index" in path:
        out["share_price"] = AnnualSeries(
            first_year - 1, np.concatenate(([100.0], path["share_price_index"])),
            Unit.INDEX_LEVEL, "share_price")
        out["dividend_yield"] = AnnualSeries(
            first_year, path["dividend_yield"] * 100.0, Unit.RATE_PERCENT,
            "dividend_yield")
    if "long_rate" in path:
        out["long_rate"] = AnnualSeries(first_year, path["long_rate"],
                                        Unit.RATE_DECIMAL, "long_rate")
    if "short_rate" in path:
        mm = 100.0 * np.concatenate(([1.0], np.exp(np.cumsum(path["short_rate"]))))
        out["money_market_index"] = AnnualSeries(first_year - 1, mm,
                                                 Unit.INDEX_LEVEL, "money_market")
    if "ilb_rate" in path:
        start = first_year if ilb_from is None else ilb_from
        vals = path["ilb_rate"][start - first_year:]
        out["ilb_yields"] = [AnnualSeries(start, vals * 100.0,
                                          Unit.RATE_PERCENT, "ilb")]
    assert len(cpi) == n + 1
    return out


def synthetic_history(params, n_years, seed, first_year=1951, ilb_from=None):
    """CascadeData built from one simulated history via the raw transforms."""
    scen = simulate_paths(params, n_years, 1, seed, first_year)
    path = {k: v[0] for k, v in scen.series.items()}
    raw = raw_series_from_path(path, first_year, ilb_from=ilb_from)
    return build_cascade_data(yield_scale="percent", **raw)


def long_synthetic_history(params, n_years, seed, first_year=1):
    """CascadeData assembled straight from one path's modelled series.

    Index levels compound exponentially, so reconstructing raw CPI / price /
    money-market indices overflows float64 somewhere past ~700 years of
    positive drift. For multi-thousand-year recovery runs we therefore skip
    the index round trip and hand the stationary series to CascadeData
    directly (the transforms are exercised elsewhere on short samples).
    """
    from saesg import CascadeData

    scen = simulate_paths(params, n_years, 1, seed, first_year)
    path = {k: v[0] for k, v in scen.series.items()}

    def s(vals, name, unit=Unit.RATE_DECIMAL):
        return AnnualSeries(first_year, np.asarray(vals, float), unit, name)

    dq = s(path["inflation"], "inflation")
    y = dd = dc = db = bd = None
    if "dividend_yield" in path:
        y = s(path["dividend_yield"] * 100.0, "dividend_yield",
              Unit.RATE_PERCENT)
    if "dividend_growth" in path:
        dd = s(path["dividend_growth"], "dividend_growth")
    if "long_rate" in path:
        dc = s(path["long_rate"], "long_rate")
    if "short_rate" in path:
        db = s(path["short_rate"], "short_rate")
        if dc is not None:
            bd = s(np.log(dc.values / db.values), "log_spread")
    return CascadeData(dq=dq, y=y, dd=dd, dc=dc, db=db, bd=bd,
                       yield_scale="percent")


def ar1_series(mu, a, sigma, n, seed, start_year=1960):
    """Plain AR(1) sample path (numpy RNG, independent of the engine)."""
    rng = np.random.default_rng(seed)
    x = np.empty(n)
    x[0] = mu + sigma / np.sqrt(1.0 - a * a) * rng.standard_normal()
    for t in range(1, n):
        x[t] = mu + a * (x[t - 1] - mu) + sigma * rng.standard_normal()
    return AnnualSeries(start_year, x, Unit.RATE_DECIMAL, "ar1")


def cls_ar1(x):
    """Closed-form conditional least squares for x_t = c + a x_{t-1} + e."""
    y, lag = x[1:], x[:-1]
    a, c = np.polyfit(lag, y, 1)
    resid = y - c - a * lag
    mu = c / (1.0 - a)
    sigma2 = float(np.mean(resid ** 2))
    return float(mu), float(a), sigma2


# ---------------------------------------------------------------------------
# Filter/step inverse-pair machinery
# ---------------------------------------------------------------------------

from saesg import CascadeState, FilterInputs, run_filter  # noqa: E402
from saesg.models import (step_dividend_yields, step_dividends,  # noqa: E402
                          step_ilb, step_inflation, step_long_rates,
                          step_short_rates)


def roundtrip_max_relerr(spec, params, inputs, ma_init=None):
    """Filter the data, re-step with the recovered shocks, and return the
    worst reconstruction error relative to the series' own scale.

    This is the inverse-pair law: stepping with z(t) = eps(t)/sigma from the
    filter's own time-zero state must reproduce the observed series. Errors
    are measured against the largest absolute observation rather than point
    by point, so years where the series passes through zero do not inflate
    a few ULPs of float noise into a fake violation.
    """
    out = run_filter(spec, params, inputs, ma_init=ma_init)
    eps = out.residuals
    sigma = params[spec.sigma_name]
    z = eps.values / sigma

    def trace0(key, default=0.0):
        tr = out.states.get(key)
        return float(tr.values[0]) if tr is not None else default

    series = spec.series
    worst = 0.0
    scale = max(float(np.max(np.abs(inputs.primary.values))), 1e-8)

    def check(got, want):
        nonlocal worst
        worst = max(worst, abs(got - want) / scale)

    if series == "inflation":
        x = inputs.primary.values
        st = CascadeState(delta_q_prev=x[0])
        for t in range(1, len(x)):
            got, st = step_inflation(params, st, z[t - 1])
            check(got, x[t])
        return worst

    if series == "dividend_yield":
        if spec.variant == "ma_inflation":
            from saesg import align
            y, dq = align(inputs.primary, inputs.dq)
            q = dq.values
        else:
            y, q = inputs.primary, np.zeros(len(inputs.primary))
        x = y.values
        st = CascadeState(ym_prev=trace0("ym"), yn_prev=trace0("yn"))
        for t in range(1, len(x)):
            got, st = step_dividend_yields(spec, params, st, q[t], z[t - 1])
            check(got, x[t])
        return worst

    if series == "dividend":
        if spec.variant in ("ma_inflation", "simultaneous_inflation"):
            from saesg import align
            dd, dq = align(inputs.primary, inputs.dq)
            q = dq.values
        else:
            dd, q = inputs.primary, np.zeros(len(inputs.primary))
        x = dd.values
        st = CascadeState(dm_prev=trace0("dm"), eps_d_prev=0.0)
        for t in range(1, len(x)):
            year = dd.start_year + t - 1
            ey = inputs.eps_y
            st.eps_y_prev = ey.value_in(year) if ey is not None and \
                ey.covers(year) else 0.0
            got, st = step_dividends(spec, params, st, q[t], z[t - 1])
            check(got, x[t])
        return worst

    if series == "long_rate":
        if spec.variant == "ma_inflation":
            from saesg import align
            dc, dq = align(inputs.primary, inputs.dq)
            q = dq.values
        else:
            dc, q = inputs.primary, np.zeros(len(inputs.primary))
        x = dc.values
        st = CascadeState(cm_prev=trace0("cm"), cn_prev=trace0("cn"))
        for t in range(1, len(x)):
            got, st = step_long_rates(spec, params, st, q[t], z[t - 1])
            check(got, x[t])
        return worst

    if series == "short_rate":
        x = inputs.primary.values
        st = CascadeState(bd_prev=x[0])
        dc_probe = 0.10
        for t in range(1, len(x)):
            db, st = step_short_rates(params, st, dc_probe, z[t - 1])
            check(np.log(dc_probe / db), x[t])
        return worst

    if series == "ilb":
        from saesg import align
        to_align = [inputs.primary]
        uses_long = "c_r" in spec.param_names
        uses_short = "b_r" in spec.param_names
        if uses_long:
            to_align.append(inputs.dc)
        if uses_short:
            to_align.append(inputs.db)
        aligned = align(*to_align)
        dr = aligned[0]
        x = dr.values
        dc_vals = aligned[1].values if uses_long else np.zeros(len(x))
        db_vals = aligned[-1].values if uses_short else np.zeros(len(x))
        st = CascadeState(delta_r_prev=x[0])
        for t in range(1, len(x)):
            got, st = step_ilb(spec, params, st, dc_vals[t], db_vals[t], z[t - 1])
            check(got, x[t])
        return worst

    raise AssertionError(f"unknown series {series}")


def _rand_ar(rng, lo=-0.85, hi=0.85):
    return float(rng.uniform(lo, hi))


def random_model_instance(series, rng, n=40):
    """Random in-domain (spec, params, inputs) triple for the given series.

    The observed series is generated with the step functions themselves so
    that every domain constraint (positive yields and rates, positive real
    long-rate component) holds by construction.
    """
    from saesg import Unit
    start = 1950
    q = 0.04 + 0.02 * rng.standard_normal(n).cumsum() / np.sqrt(np.arange(1, n + 1))
    dq = AnnualSeries(start, q, Unit.RATE_DECIMAL, "dq")

    if series == "inflation":
        spec = ModelSpec("inflation", "ar1")
        p = ParamSet.from_dict(spec, {"mu_q": rng.normal(0.05, 0.02),
                                      "a_q": _rand_ar(rng),
                                      "sigma_q": rng.uniform(0.005, 0.05)})
        st = CascadeState(delta_q_prev=p["mu_q"])
        xs = [p["mu_q"]]
        for _ in range(n - 1):
            v, st = step_inflation(p, st, rng.standard_normal())
            xs.append(v)
        inputs = FilterInputs(primary=AnnualSeries(start, np.array(xs),
                                                   Unit.RATE_DECIMAL, "dq"))
        return spec, p, inputs

    if series == "dividend_yield":
        variant = rng.choice(["ar1", "ma_inflation"])
        spec = ModelSpec("dividend_yield", variant)
        vals = {"mu_y": rng.normal(1.0, 0.3), "a_y": _rand_ar(rng),
                "sigma_y": rng.uniform(0.05, 0.3)}
        if variant == "ma_inflation":
            vals["w_y"] = rng.normal(0.0, 2.0)
            vals["d_y"] = rng.uniform(0.05, 0.95)
        p = ParamSet.from_dict(spec, vals)
        st = CascadeState(ym_prev=q[0], yn_prev=0.0)
        ys = [float(np.exp((vals["w_y"] * q[0] + (1 - vals["w_y"]) * q[0]
                            if variant == "ma_inflation" else 0.0) + vals["mu_y"]))]
        for t in range(1, n):
            v, st = step_dividend_yields(spec, p, st, q[t], rng.standard_normal())
            ys.append(float(v))
        y = AnnualSeries(start, np.array(ys), Unit.RATE_PERCENT, "y")
        return spec, p, FilterInputs(primary=y, dq=dq)

    if series == "dividend":
        variant = rng.choice(["ma_inflation", "simultaneous_inflation", "yield_only"])
        spec = ModelSpec("dividend", variant)
        vals = {"mu_d": rng.normal(0.05, 0.03), "y_d": rng.normal(-0.2, 0.2),
                "k_d": _rand_ar(rng), "sigma_d": rng.uniform(0.02, 0.2)}
        if variant == "ma_inflation":
            vals["w_d"] = rng.normal(0.0, 2.0)
            vals["d_d"] = rng.uniform(0.05, 0.95)
        elif variant == "simultaneous_inflation":
            vals["q_d"] = rng.normal(1.0, 0.5)
        p = ParamSet.from_dict(spec, vals)
        eps_y = AnnualSeries(start, 0.15 * rng.standard_normal(n),
                             Unit.LOG_VALUE, "eps_y")
        st = CascadeState(dm_prev=q[0], eps_d_prev=0.0)
        xs = [0.0]
        for t in range(1, n):
            st.eps_y_prev = eps_y.value_in(start + t - 1)
            v, st = step_dividends(spec, p, st, q[t], rng.standard_normal())
            xs.append(float(v))
        dd = AnnualSeries(start, np.array(xs), Unit.RATE_DECIMAL, "dd")
        return spec, p, FilterInputs(primary=dd, dq=dq, eps_y=eps_y)

    if series == "long_rate":
        variant = rng.choice(["ar1_log", "ma_inflation"])
        spec = ModelSpec("long_rate", variant)
        vals = {"mu_c": rng.uniform(0.02, 0.1), "a_c": _rand_ar(rng),
                "sigma_c": rng.uniform(0.05, 0.3)}
        if variant == "ma_inflation":
            vals["w_c"] = rng.uniform(0.3, 1.0)
            vals["d_c"] = rng.uniform(0.05, 0.95)
        p = ParamSet.from_dict(spec, vals)
        st = CascadeState(cm_prev=q[0], cn_prev=0.0)
        first = vals["w_c"] * q[0] + vals["mu_c"] if variant == "ma_inflation" \
            else vals["mu_c"]
        xs = [float(first)]
        for t in range(1, n):
            v, st = step_long_rates(spec, p, st, q[t], rng.standard_normal())
            xs.append(float(v))
        dc = AnnualSeries(start, np.array(xs), Unit.RATE_DECIMAL, "dc")
        return spec, p, FilterInputs(primary=dc, dq=dq)

    if series == "short_rate":
        spec = ModelSpec("short_rate", "ar1_spread")
        p = ParamSet.from_dict(spec, {"mu_b": rng.normal(0.15, 0.05),
                                      "a_b": _rand_ar(rng),
                                      "sigma_b": rng.uniform(0.05, 0.3)})
        st = CascadeState(bd_prev=p["mu_b"])
        xs = [p["mu_b"]]
        for _ in range(n - 1):
            db, st = step_short_rates(p, st, 0.1, rng.standard_normal())
            xs.append(float(np.log(0.1 / db)))
        bd = AnnualSeries(start, np.array(xs), Unit.LOG_VALUE, "bd")
        return spec, p, FilterInputs(primary=bd)

    if series == "ilb":
        variant = rng.choice(["ar1", "long_only", "short_with_mean",
                              "short_no_mean", "both_rates"])
        spec = ModelSpec("ilb", variant)
        vals = {"a_r": _rand_ar(rng), "sigma_r": rng.uniform(0.002, 0.02)}
        if "mu_r" in spec.param_names:
            vals["mu_r"] = rng.normal(0.02, 0.01)
        if "c_r" in spec.param_names:
            vals["c_r"] = rng.normal(0.1, 0.1)
        if "b_r" in spec.param_names:
            vals["b_r"] = rng.normal(0.1, 0.1)
        p = ParamSet.from_dict(spec, vals)
        dc_vals = 0.08 + 0.01 * rng.standard_normal(n)
        db_vals = 0.06 + 0.01 * rng.standard_normal(n)
        st = CascadeState(delta_r_prev=vals.get("mu_r", 0.02))
        xs = [st.delta_r_prev]
        for t in range(1, n):
            v, st = step_ilb(spec, p, st, dc_vals[t], db_vals[t],
                             rng.standard_normal())
            xs.append(float(v))
        dr = AnnualSeries(start, np.array(xs), Unit.RATE_DECIMAL, "dr")
        dc = AnnualSeries(start, dc_vals, Unit.RATE_DECIMAL, "dc")
        db = AnnualSeries(start, db_vals, Unit.RATE_DECIMAL, "db")
        return spec, p, FilterInputs(primary=dr, dc=dc, db=db)

    raise AssertionError(series)
