"""
Out-of-sample backtest of the cascade
=====================================

Holds out the last decade of an 80-year history, refits every model on
the truncated sample, projects fans over the holdout, and counts how
often the held-out observations land inside the 95% band. With a
correctly specified model the hit rate should sit near (but usually a
touch under) 95%, since the fans carry process noise only, not
parameter uncertainty.
"""
import numpy as np

from saesg import (AnnualSeries, ModelParams, ModelSpec, ParamSet, Unit,
                   build_cascade_data, neutral_state, simulate)
from saesg.simulation import backtest

CALIBRATION = {
    ("inflation", "ar1"): {"mu_q": 0.0809, "a_q": 0.8433, "sigma_q": 0.0220},
    ("dividend_yield", "ma_inflation"): {"w_y": -4.0074, "d_y": 0.1396,
                                         "mu_y": 0.3781, "a_y": 0.6318,
                                         "sigma_y": 0.1973},
    ("dividend", "ma_inflation"): {"w_d": -5.5068, "d_d": 0.6499,
                                   "mu_d": 0.0649, "y_d": -0.1850,
                                   "k_d": 0.2798, "sigma_d": 0.1086},
    ("long_rate", "ar1_log"): {"mu_c": 0.1174, "a_c": 0.9328,
                               "sigma_c": 0.0115},
    ("short_rate", "ar1_spread"): {"mu_b": 0.1568, "a_b": 0.5527,
                                   "sigma_b": 0.1996},
}

params = {}
for (series, variant), values in CALIBRATION.items():
    spec = ModelSpec(series, variant)
    params[series] = ModelParams(spec, ParamSet.from_dict(spec, values))

# 80 years of raw data quoted the usual way.
FIRST_YEAR = 1940
scen = simulate(params, neutral_state(params), horizon=80, n_paths=1,
                seed=17, yield_scale="percent")
path = {k: v[0] for k, v in scen.series.items()}
data = build_cascade_data(
    cpi=AnnualSeries(FIRST_YEAR - 1, np.r_[100.0, path["cpi_index"]],
                     Unit.INDEX_LEVEL, "cpi"),
    share_price=AnnualSeries(FIRST_YEAR - 1,
                             np.r_[100.0, path["share_price_index"]],
                             Unit.INDEX_LEVEL, "share_price"),
    dividend_yield=AnnualSeries(FIRST_YEAR, path["dividend_yield"] * 100.0,
                                Unit.RATE_PERCENT, "dividend_yield"),
    long_rate=AnnualSeries(FIRST_YEAR, path["long_rate"], Unit.RATE_DECIMAL,
                           "long_rate"),
    money_market_index=AnnualSeries(
        FIRST_YEAR - 1,
        100.0 * np.r_[1.0, np.exp(np.cumsum(path["short_rate"]))],
        Unit.INDEX_LEVEL, "money_market"),
)

specs = {name: p.spec for name, p in params.items()}
SPLIT = 2009
report = backtest(data, specs, split_year=SPLIT, horizon=10,
                  n_paths=20_000, seed=99, n_starts=2)

print(f"fitted through {report.split_year}, "
      f"projected {report.horizon} years with {report.n_paths} paths")

print(f"\ninflation holdout, fan vs observed")
print(f"  {'year':>6}{'q2.5%':>9}{'median':>9}{'q97.5%':>9}"
      f"{'observed':>10}  in95")
for row in report.rows["inflation"]:
    mark = "yes" if row.inside_95 else "NO"
    print(f"  {row.year:>6}{row.q025:>9.4f}{row.q50:>9.4f}{row.q975:>9.4f}"
          f"{row.observed:>10.4f}  {mark}")

print("\n95% coverage over the holdout")
for name, cov in report.coverage_95.items():
    n_years = len(report.rows[name])
    print(f"  {name:<16}{cov:.2f}  ({round(cov * n_years)}/{n_years} years)")
