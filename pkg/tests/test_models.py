"""Filter/step tests for the six cascade models.

Each model is checked three ways: hand-computed anchor values for single
steps, limiting cases where a variant collapses to a simpler one, and the
filter/step inverse-pair law (re-stepping with the recovered shocks must
reproduce the observed series).
"""
import numpy as np
import pytest

from saesg import (AnnualSeries, CascadeState, FilterError, FilterInputs,
                   ModelSpec, ParamSet, Unit, align, run_filter)
from saesg.models import (VARIANT_PARAMS, filter_dividend_yields,
                          filter_dividends, filter_ilb, filter_inflation,
                          filter_long_rates, filter_short_rates,
                          implied_dividend_yield, share_price,
                          step_dividend_yields, step_dividends, step_ilb,
                          step_inflation, step_long_rates, step_short_rates,
                          _ma_level)
from helpers import (DIVIDEND_MA_PARAMS, ILB_AR1_PARAMS, ILB_SHORT_PARAMS,
                     INFLATION_PARAMS, LONG_AR1_LOG_PARAMS, LONG_MA_PARAMS,
                     SHORT_PARAMS, YIELD_AR1_PARAMS, YIELD_MA_PARAMS,
                     model_params, random_model_instance, roundtrip_max_relerr)

DIVIDEND_YONLY_PARAMS = {"mu_d": 0.05, "y_d": -0.2, "k_d": 0.3, "sigma_d": 0.1}
ILB_BOTH_PARAMS = {"mu_r": 0.02, "a_r": 0.6, "c_r": 0.15, "b_r": 0.08,
                   "sigma_r": 0.004}


def _series(start, values, unit=Unit.RATE_DECIMAL, name="x"):
    return AnnualSeries(start, np.asarray(values, dtype=float), unit, name)


def _params(series, variant, values, fixed=None):
    mp = model_params(series, variant, values, fixed)
    return mp.spec, mp.params


# ---------------------------------------------------------------------------
# ModelSpec / ParamSet plumbing
# ---------------------------------------------------------------------------

def test_variant_table_is_exhaustive():
    assert set(VARIANT_PARAMS) == {
        ("inflation", "ar1"),
        ("dividend_yield", "ar1"), ("dividend_yield", "ma_inflation"),
        ("dividend", "ma_inflation"), ("dividend", "simultaneous_inflation"),
        ("dividend", "yield_only"),
        ("long_rate", "ar1_log"), ("long_rate", "ma_inflation"),
        ("short_rate", "ar1_spread"),
        ("ilb", "ar1"), ("ilb", "both_rates"), ("ilb", "long_only"),
        ("ilb", "short_with_mean"), ("ilb", "short_no_mean"),
    }


def test_model_spec_rejects_unknown_combination():
    with pytest.raises(Exception):
        ModelSpec("inflation", "ma_inflation")


def test_param_set_roundtrip_and_fixed():
    spec = ModelSpec("long_rate", "ma_inflation", {"w_c": 1.0, "d_c": 0.13})
    ps = ParamSet.from_dict(spec, dict(LONG_MA_PARAMS))
    assert ps["w_c"] == 1.0
    assert "w_c" in ps.fixed and "a_c" not in ps.fixed
    assert spec.free_names == ("mu_c", "a_c", "sigma_c")
    assert ps.as_dict() == pytest.approx(dict(LONG_MA_PARAMS))
    assert ps.get("no_such", 7.0) == 7.0
    with pytest.raises(KeyError):
        ps["no_such"]


# ---------------------------------------------------------------------------
# Inflation
# ---------------------------------------------------------------------------

def test_inflation_step_anchor():
    # mu=0.0809, a=0.8433, sigma=0.0220, previous force at the mean,
    # one positive standard shock.
    spec, p = _params("inflation", "ar1", INFLATION_PARAMS)
    val, st = step_inflation(p, CascadeState(delta_q_prev=0.0809), 1.0)
    assert val == pytest.approx(0.1029, abs=1e-10)
    assert st.delta_q_prev == val


def test_inflation_filter_hand_residual():
    spec, p = _params("inflation", "ar1",
                      {"mu_q": 0.08, "a_q": 0.8, "sigma_q": 0.02})
    x = _series(1960, [0.10, 0.096])
    out = filter_inflation(p, x)
    # eps(1961) = 0.096 - 0.08 - 0.8*(0.10 - 0.08) = 0
    assert out.residuals.start_year == 1961
    assert out.n_obs == 1
    np.testing.assert_allclose(out.residuals.values, [0.0], atol=1e-15)
    assert out.final_state["delta_q_prev"] == 0.096


def test_inflation_white_noise_limit():
    # a_q = 0 reduces the filter to de-meaning.
    spec, p = _params("inflation", "ar1",
                      {"mu_q": 0.05, "a_q": 0.0, "sigma_q": 0.02})
    rng = np.random.default_rng(3)
    vals = 0.05 + 0.02 * rng.standard_normal(30)
    out = filter_inflation(p, _series(1950, vals))
    np.testing.assert_allclose(out.residuals.values, vals[1:] - 0.05,
                               rtol=1e-13)


def test_inflation_constant_at_mean_gives_zero_residuals():
    spec, p = _params("inflation", "ar1", INFLATION_PARAMS)
    x = _series(1950, np.full(12, p["mu_q"]))
    out = filter_inflation(p, x)
    np.testing.assert_allclose(out.residuals.values, 0.0, atol=1e-15)


def test_inflation_step_fixed_point():
    spec, p = _params("inflation", "ar1", INFLATION_PARAMS)
    val, _ = step_inflation(p, CascadeState(delta_q_prev=p["mu_q"]), 0.0)
    assert val == pytest.approx(p["mu_q"], abs=1e-15)


# ---------------------------------------------------------------------------
# Dividend yields
# ---------------------------------------------------------------------------

def test_yield_ma_with_unit_weight_tracks_inflation():
    # w_y = 1, d_y = 1 makes the smoothed force equal current inflation.
    spec, p = _params("dividend_yield", "ma_inflation",
                      {"w_y": 1.0, "d_y": 1.0, "mu_y": 0.4, "a_y": 0.0,
                       "sigma_y": 0.1})
    rng = np.random.default_rng(7)
    q = 0.05 + 0.02 * rng.standard_normal(15)
    dq = _series(1970, q)
    y = _series(1970, np.exp(q + 0.4), Unit.RATE_PERCENT, "y")
    out = filter_dividend_yields(spec, p, y, dq)
    np.testing.assert_allclose(out.residuals.values, 0.0, atol=1e-13)


def test_yield_step_unit_gain_converges_to_inflation_plus_mean():
    # With no noise the yield settles at exp(delta_q + mu_y); at the
    # published estimates exp(0.0809 + 0.3781).
    spec, p = _params("dividend_yield", "ma_inflation",
                      {"w_y": 1.0, "d_y": YIELD_MA_PARAMS["d_y"],
                       "mu_y": 0.3781, "a_y": YIELD_MA_PARAMS["a_y"],
                       "sigma_y": YIELD_MA_PARAMS["sigma_y"]})
    st = CascadeState(ym_prev=0.0, yn_prev=0.5)
    y = None
    for _ in range(400):
        y, st = step_dividend_yields(spec, p, st, 0.0809, 0.0)
    assert y == pytest.approx(np.exp(0.0809 + 0.3781), rel=1e-9)


def test_yield_ar1_ignores_inflation():
    spec, p = _params("dividend_yield", "ar1", YIELD_AR1_PARAMS)
    st = CascadeState(ym_prev=123.0, yn_prev=0.2)
    y1, _ = step_dividend_yields(spec, p, st, 0.50, 0.3)
    st2 = CascadeState(ym_prev=-5.0, yn_prev=0.2)
    y2, _ = step_dividend_yields(spec, p, st2, -0.50, 0.3)
    assert y1 == y2


def test_yield_zero_noise_zero_persistence_gives_exp_mean():
    spec, p = _params("dividend_yield", "ar1",
                      {"mu_y": 1.2695, "a_y": 0.0, "sigma_y": 0.2261})
    y, st = step_dividend_yields(spec, p, CascadeState(yn_prev=0.9), 0.0, 0.0)
    assert y == pytest.approx(np.exp(1.2695), rel=1e-12)
    assert st.eps_y_prev == 0.0


def test_yield_filter_residual_year_bookkeeping():
    spec, p = _params("dividend_yield", "ma_inflation", YIELD_MA_PARAMS)
    rng = np.random.default_rng(11)
    dq = _series(1955, 0.05 + 0.01 * rng.standard_normal(20))
    y = _series(1958, np.exp(0.4 + 0.1 * rng.standard_normal(14)),
                Unit.RATE_PERCENT, "y")
    out = filter_dividend_yields(spec, p, y, dq)
    # alignment clips to the yield span; first usable year is consumed
    assert out.residuals.start_year == 1959
    assert out.n_obs == 13
    assert out.final_year == 1971


def test_implied_yield_matches_state():
    spec, p = _params("dividend_yield", "ma_inflation", YIELD_MA_PARAMS)
    st = CascadeState(delta_q_prev=0.06, ym_prev=0.05, yn_prev=0.12)
    w, mu = p["w_y"], p["mu_y"]
    want = np.exp(w * 0.05 + (1 - w) * 0.06 + mu + 0.12)
    assert implied_dividend_yield(spec, p, st) == pytest.approx(want, rel=1e-14)


# ---------------------------------------------------------------------------
# Dividends
# ---------------------------------------------------------------------------

def test_dividend_unit_gain_tracks_inflation():
    # Simultaneous variant with q_d = 1, everything else off: growth equals
    # inflation plus the mean.
    spec, p = _params("dividend", "simultaneous_inflation",
                      {"q_d": 1.0, "mu_d": 0.02, "y_d": 0.0, "k_d": 0.0,
                       "sigma_d": 0.1})
    st = CascadeState()
    v, _ = step_dividends(spec, p, st, 0.07, 0.0)
    assert v == pytest.approx(0.09, abs=1e-15)


def test_dividend_yield_shock_feedthrough():
    # y_d * eps_y(t-1) enters the mean: -0.1850 * 0.1 = -0.0185.
    spec, p = _params("dividend", "ma_inflation", DIVIDEND_MA_PARAMS)
    base = CascadeState(dm_prev=0.0, eps_y_prev=0.0, eps_d_prev=0.0)
    bumped = CascadeState(dm_prev=0.0, eps_y_prev=0.1, eps_d_prev=0.0)
    v0, _ = step_dividends(spec, p, base, 0.0, 0.0)
    v1, _ = step_dividends(spec, p, bumped, 0.0, 0.0)
    assert v1 - v0 == pytest.approx(p["y_d"] * 0.1, abs=1e-15)
    assert v1 - v0 == pytest.approx(-0.0185, abs=1e-10)


def test_dividend_step_zero_state_gives_mean():
    spec, p = _params("dividend", "yield_only", DIVIDEND_YONLY_PARAMS)
    v, st = step_dividends(spec, p, CascadeState(), 0.0, 0.0)
    assert v == pytest.approx(p["mu_d"], abs=1e-15)
    assert st.eps_d_prev == 0.0


def test_dividend_published_limit_with_full_passthrough():
    # At the ma_inflation estimates, with the smoothed force converged to a
    # constant q, the long-run growth is q + mu_d (the carry-over terms die
    # out when shocks stop).
    spec, p = _params("dividend", "ma_inflation", DIVIDEND_MA_PARAMS)
    st = CascadeState(dm_prev=0.08, eps_y_prev=0.0, eps_d_prev=0.0)
    v = None
    for _ in range(500):
        v, st = step_dividends(spec, p, st, 0.08, 0.0)
    assert v == pytest.approx(0.08 + p["mu_d"], rel=1e-9)
    assert p["mu_d"] == pytest.approx(0.0649, abs=1e-12)


def test_dividend_ma_filter_seeds_carryover_at_zero():
    # First residual treats eps_d(t0) = 0, so a series generated that way is
    # reproduced with zero residuals.
    spec, p = _params("dividend", "yield_only",
                      {"mu_d": 0.05, "y_d": 0.0, "k_d": 0.7, "sigma_d": 0.1})
    # one shock at t1, then quiet: eps chain decays through k_d
    dd = [0.0, 0.05 + 0.1, 0.05 + 0.7 * 0.1, 0.05, 0.05]
    out = filter_dividends(spec, p, _series(1990, dd), None, None)
    got = out.residuals.values
    np.testing.assert_allclose(got, [0.1, 0.0, -0.7 * 0.7 * 0.1 * 0, 0.0],
                               atol=1e-13)


def test_dividend_lagged_yield_shock_alignment():
    # The filter must pick up eps_y from the year before each residual year
    # and use zero where the yield residuals do not cover it.
    spec, p = _params("dividend", "yield_only",
                      {"mu_d": 0.0, "y_d": 1.0, "k_d": 0.0, "sigma_d": 0.1})
    eps_y = _series(1991, [0.3, -0.2], Unit.LOG_VALUE, "eps_y")
    dd = _series(1990, [0.0, 0.0, 0.3, -0.2, 0.0])
    out = filter_dividends(spec, p, dd, None, eps_y)
    # years 1991..1994; eps_y(t-1) = [0 (1990), 0.3, -0.2, 0 (1993)]
    np.testing.assert_allclose(out.residuals.values, [0.0, 0.0, 0.0, 0.0],
                               atol=1e-14)


# ---------------------------------------------------------------------------
# Share price identity
# ---------------------------------------------------------------------------

def test_share_price_identity():
    assert share_price(35.0, 0.035) == pytest.approx(1000.0, rel=1e-14)


def test_share_price_zero_dividend():
    assert share_price(0.0, 0.04) == 0.0


def test_share_price_rejects_nonpositive_yield():
    with pytest.raises(Exception):
        share_price(10.0, 0.0)


def test_share_price_consistency_with_growth():
    # P(t)/P(t-1) = exp(dd(t)) * Y(t-1)/Y(t)
    d0, y0 = 20.0, 0.04
    dd, y1 = 0.08, 0.05
    p0 = share_price(d0, y0)
    p1 = share_price(d0 * np.exp(dd), y1)
    assert p1 / p0 == pytest.approx(np.exp(dd) * y0 / y1, rel=1e-14)


# ---------------------------------------------------------------------------
# Long rates
# ---------------------------------------------------------------------------

def test_long_rate_mean_is_exp_of_published_log_mean():
    # The log-mean is published to four decimals, so the level mean is only
    # pinned down to a couple of units in the fifth place.
    assert np.exp(-3.3892) == pytest.approx(0.03372, abs=2e-5)


def test_long_rate_ar1_constant_series_residuals():
    # A constant series c solves eps = (1 - a_c) * (ln c - ln mu_c) each year.
    spec, p = _params("long_rate", "ar1_log", LONG_AR1_LOG_PARAMS)
    c = 0.05
    out = filter_long_rates(spec, p, _series(1980, np.full(8, c)), None)
    want = (1 - p["a_c"]) * (np.log(c) - np.log(p["mu_c"]))
    np.testing.assert_allclose(out.residuals.values, want, rtol=1e-12)


def test_long_rate_ma_zero_weight_decouples_from_inflation():
    spec, p = _params("long_rate", "ma_inflation",
                      {"w_c": 0.0, "d_c": 0.5, "mu_c": 0.03, "a_c": 0.6,
                       "sigma_c": 0.2})
    spec2, p2 = _params("long_rate", "ar1_log",
                        {"mu_c": 0.03, "a_c": 0.6, "sigma_c": 0.2})
    rng = np.random.default_rng(5)
    dc = _series(1970, 0.03 * np.exp(0.2 * rng.standard_normal(15)))
    dq = _series(1970, 0.05 + 0.01 * rng.standard_normal(15))
    out_ma = filter_long_rates(spec, p, dc, dq)
    out_ar = filter_long_rates(spec2, p2, dc, None)
    np.testing.assert_allclose(out_ma.residuals.values,
                               out_ar.residuals.values, rtol=1e-12)


def test_long_rate_fisher_step():
    # In the MA variant the simulated rate is w_c * smoothed inflation plus a
    # positive real part; with the smoothing converged the deterministic rate
    # is w_c * q + mu_c.
    spec, p = _params("long_rate", "ma_inflation",
                      {"w_c": 1.0, "d_c": 0.13, "mu_c": 0.0337, "a_c": 0.5665,
                       "sigma_c": 0.3610}, fixed={"w_c": 1.0, "d_c": 0.13})
    st = CascadeState(cm_prev=0.06, cn_prev=0.0)
    v = None
    for _ in range(600):
        v, st = step_long_rates(spec, p, st, 0.06, 0.0)
    assert v == pytest.approx(1.0 * 0.06 + 0.0337, rel=1e-9)


def test_long_rate_ma_positivity_error_names_year():
    spec, p = _params("long_rate", "ma_inflation",
                      {"w_c": 1.0, "d_c": 0.9, "mu_c": 0.03, "a_c": 0.5,
                       "sigma_c": 0.2})
    dc = _series(1970, [0.18, 0.02, 0.18])
    dq = _series(1970, [0.08, 0.09, 0.08])
    with pytest.raises(FilterError) as exc:
        filter_long_rates(spec, p, dc, dq)
    assert "1971" in str(exc.value)


def test_long_rate_ar1_rejects_nonpositive_rate():
    spec, p = _params("long_rate", "ar1_log", LONG_AR1_LOG_PARAMS)
    with pytest.raises(FilterError):
        filter_long_rates(spec, p, _series(1970, [0.05, -0.01, 0.05]), None)


def test_ma_level_matches_manual_recursion():
    rng = np.random.default_rng(9)
    x = rng.standard_normal(25)
    d = 0.3
    got = _ma_level(x, d, x[0])
    want = np.empty_like(x)
    want[0] = x[0]
    for i in range(1, len(x)):
        want[i] = d * x[i] + (1 - d) * want[i - 1]
    np.testing.assert_array_equal(got, want)


def test_long_rate_ma_init_override():
    spec, p = _params("long_rate", "ma_inflation", LONG_MA_PARAMS,
                      fixed={"w_c": 1.0, "d_c": 0.13})
    rng = np.random.default_rng(13)
    dq = _series(1970, 0.06 + 0.01 * rng.standard_normal(10))
    dc = _series(1970, 0.10 + 0.01 * rng.standard_normal(10))
    out_default = filter_long_rates(spec, p, dc, dq)
    out_override = filter_long_rates(spec, p, dc, dq, ma_init=0.02)
    assert out_override.states["cm"].values[0] == 0.02
    assert not np.allclose(out_default.residuals.values,
                           out_override.residuals.values)


# ---------------------------------------------------------------------------
# Short rates
# ---------------------------------------------------------------------------

def test_short_rate_step_anchor():
    # bd_prev = mu_b = 0.1568 with no shock keeps the spread at the mean:
    # delta_b = 0.10 * exp(-0.1568) = 0.085487.
    spec, p = _params("short_rate", "ar1_spread", SHORT_PARAMS)
    db, st = step_short_rates(p, CascadeState(bd_prev=0.1568), 0.10, 0.0)
    assert db == pytest.approx(0.085487, abs=1e-6)
    assert st.bd_prev == pytest.approx(0.1568, abs=1e-15)


def test_short_rate_zero_spread_equals_long_rate():
    spec, p = _params("short_rate", "ar1_spread",
                      {"mu_b": 0.0, "a_b": 0.7, "sigma_b": 0.2})
    db, _ = step_short_rates(p, CascadeState(bd_prev=0.0), 0.0834, 0.0)
    assert db == pytest.approx(0.0834, rel=1e-14)


def test_short_rate_filter_is_plain_ar1_on_spread():
    spec, p = _params("short_rate", "ar1_spread", SHORT_PARAMS)
    rng = np.random.default_rng(17)
    bd = 0.1568 + 0.05 * rng.standard_normal(20)
    out = filter_short_rates(p, _series(1960, bd, Unit.LOG_VALUE, "bd"))
    want = bd[1:] - 0.1568 - p["a_b"] * (bd[:-1] - 0.1568)
    np.testing.assert_allclose(out.residuals.values, want, rtol=1e-12)
    assert out.final_state["bd_prev"] == bd[-1]


# ---------------------------------------------------------------------------
# Index-linked real rates
# ---------------------------------------------------------------------------

def test_ilb_ar1_step_equation_value():
    # The plain AR(1) at mu_r = 0.0222, a_r = 0.7194 from delta_r_prev =
    # 0.022: 0.0222 + 0.7194 * (0.022 - 0.0222) = 0.0220561. A worked value
    # of 0.022186 circulates for this case but does not satisfy the
    # equation; the equation wins.
    spec, p = _params("ilb", "ar1", ILB_AR1_PARAMS)
    v, st = step_ilb(spec, p, CascadeState(delta_r_prev=0.022), 0.0, 0.0, 0.0)
    assert v == pytest.approx(0.0222 + 0.7194 * (0.022 - 0.0222), abs=1e-15)
    assert v == pytest.approx(0.0220561, abs=5e-8)
    assert st.delta_r_prev == v


def test_ilb_short_no_mean_direct_equation():
    spec, p = _params("ilb", "short_no_mean", ILB_SHORT_PARAMS)
    prev, db = 0.025, 0.07
    v, _ = step_ilb(spec, p, CascadeState(delta_r_prev=prev), 0.0, db, 0.0)
    want = p["a_r"] * prev + p["b_r"] * db
    assert v == pytest.approx(want, rel=1e-14)


def test_ilb_both_rates_regressors_enter_linearly():
    spec, p = _params("ilb", "both_rates", ILB_BOTH_PARAMS)
    st = CascadeState(delta_r_prev=0.02)
    v0, _ = step_ilb(spec, p, st, 0.0, 0.0, 0.0)
    v1, _ = step_ilb(spec, p, CascadeState(delta_r_prev=0.02), 0.10, 0.0, 0.0)
    v2, _ = step_ilb(spec, p, CascadeState(delta_r_prev=0.02), 0.0, 0.10, 0.0)
    assert v1 - v0 == pytest.approx(p["c_r"] * 0.10, rel=1e-12)
    assert v2 - v0 == pytest.approx(p["b_r"] * 0.10, rel=1e-12)


def test_ilb_filter_alignment_with_regressors():
    spec, p = _params("ilb", "both_rates", ILB_BOTH_PARAMS)
    rng = np.random.default_rng(21)
    dr = _series(2001, 0.02 + 0.005 * rng.standard_normal(10), name="dr")
    dc = _series(1999, 0.08 + 0.005 * rng.standard_normal(14), name="dc")
    db = _series(2000, 0.06 + 0.005 * rng.standard_normal(12), name="db")
    out = filter_ilb(spec, p, dr, dc, db)
    assert out.residuals.start_year == 2002
    assert out.n_obs == 9


# ---------------------------------------------------------------------------
# Dispatcher and inverse pairs
# ---------------------------------------------------------------------------

def test_run_filter_dispatch_matches_direct_calls():
    rng = np.random.default_rng(2)
    spec, p, inputs = random_model_instance("dividend_yield", rng)
    out1 = run_filter(spec, p, inputs)
    out2 = filter_dividend_yields(spec, p, inputs.primary, inputs.dq)
    np.testing.assert_array_equal(out1.residuals.values, out2.residuals.values)


@pytest.mark.parametrize("series", ["inflation", "dividend_yield", "dividend",
                                    "long_rate", "short_rate", "ilb"])
def test_filter_step_inverse_pair(series):
    rng = np.random.default_rng(hash(series) % 2**32)
    for _ in range(5):
        spec, p, inputs = random_model_instance(series, rng)
        assert roundtrip_max_relerr(spec, p, inputs) < 1e-12


def test_roundtrip_on_aligned_subwindow():
    # Staggered spans: the inverse pair must hold on the aligned window too.
    rng = np.random.default_rng(31)
    spec, p, inputs = random_model_instance("dividend_yield", rng)
    y = inputs.primary.window(inputs.primary.start_year + 3,
                              inputs.primary.end_year - 2)
    clipped = FilterInputs(primary=y, dq=inputs.dq)
    assert roundtrip_max_relerr(spec, p, clipped) < 1e-12
