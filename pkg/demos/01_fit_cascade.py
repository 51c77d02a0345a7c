"""
Calibrating the full cascade from raw series
============================================

Simulates 60 years of annual data from a known calibration, rebuilds the
raw inputs an analyst would actually hold (a CPI index, a share price
index, quoted dividend yields, long bond yields, a money market index),
then refits every model and compares the estimates with the truth.
"""
import numpy as np

from saesg import (AnnualSeries, ModelParams, ModelSpec, ParamSet, Unit,
                   build_cascade_data, fit_cascade, neutral_state, simulate)

TRUTH = {
    "inflation": ("ar1", {"mu_q": 0.0809, "a_q": 0.8433, "sigma_q": 0.0220}),
    "dividend_yield": ("ma_inflation", {"w_y": -4.0074, "d_y": 0.1396,
                                        "mu_y": 0.3781, "a_y": 0.6318,
                                        "sigma_y": 0.1973}),
    "dividend": ("ma_inflation", {"w_d": -5.5068, "d_d": 0.6499,
                                  "mu_d": 0.0649, "y_d": -0.1850,
                                  "k_d": 0.2798, "sigma_d": 0.1086}),
    "long_rate": ("ar1_log", {"mu_c": 0.1174, "a_c": 0.9328,
                              "sigma_c": 0.0115}),
    "short_rate": ("ar1_spread", {"mu_b": 0.1568, "a_b": 0.5527,
                                  "sigma_b": 0.1996}),
}

params = {}
for series, (variant, values) in TRUTH.items():
    spec = ModelSpec(series, variant)
    params[series] = ModelParams(spec, ParamSet.from_dict(spec, values))

# One 60-year history, quoted the way data vendors quote it.
FIRST_YEAR = 1958
scen = simulate(params, neutral_state(params), horizon=60, n_paths=1,
                seed=5, yield_scale="percent")
path = {k: v[0] for k, v in scen.series.items()}

cpi = AnnualSeries(FIRST_YEAR - 1, np.r_[100.0, path["cpi_index"]],
                   Unit.INDEX_LEVEL, "cpi")
px = AnnualSeries(FIRST_YEAR - 1, np.r_[100.0, path["share_price_index"]],
                  Unit.INDEX_LEVEL, "share_price")
dy = AnnualSeries(FIRST_YEAR, path["dividend_yield"] * 100.0,
                  Unit.RATE_PERCENT, "dividend_yield")
long_rate = AnnualSeries(FIRST_YEAR, path["long_rate"], Unit.RATE_DECIMAL,
                         "long_rate")
mm = AnnualSeries(FIRST_YEAR - 1,
                  100.0 * np.r_[1.0, np.exp(np.cumsum(path["short_rate"]))],
                  Unit.INDEX_LEVEL, "money_market")

data = build_cascade_data(cpi=cpi, share_price=px, dividend_yield=dy,
                          long_rate=long_rate, money_market_index=mm)

specs = {name: p.spec for name, p in params.items()}
fits = fit_cascade(specs, data, n_starts=3)

print(f"fitted {len(fits)} models on {data.dq.start_year}-{data.dq.end_year}")
for name, res in fits.items():
    print(f"\n{name}/{res.spec.variant}  "
          f"(n={res.n_obs}, log-likelihood {res.log_likelihood:.2f})")
    print(f"  {'param':<8}{'truth':>10}{'estimate':>10}{'std err':>10}")
    for pname in res.params.names:
        truth = TRUTH[name][1][pname]
        se = res.params.std_error(pname)
        se_txt = f"{se:9.4f}" if se is not None else "      n/a"
        print(f"  {pname:<8}{truth:>10.4f}{res.params[pname]:>10.4f} {se_txt}")
