"""Recursive parameter-stability scan over expanding windows.

The mean of the data-generating process shifts downward halfway through
the sample, the kind of regime change an annual calibration quietly
absorbs. Refitting on every expanding window makes the drift visible:
the estimated long-run mean walks down once the window starts eating
post-break years, and the confidence interval narrows as data accrues.
"""
import numpy as np

from saesg import AnnualSeries, ModelSpec, Unit, build_cascade_data
from saesg.pipeline import stability

rng = np.random.default_rng(11)

# 70 years of force of inflation: mean 12% for 35 years, then 5%.
a, sigma = 0.6, 0.02
delta = np.empty(70)
level = 0.12
delta[0] = level
for t in range(1, delta.size):
    if t == 35:
        level = 0.05
    delta[t] = level + a * (delta[t - 1] - level) + sigma * rng.standard_normal()

cpi = AnnualSeries(1950, 100.0 * np.exp(np.r_[0.0, np.cumsum(delta)]),
                   Unit.INDEX_LEVEL, "cpi")
data = build_cascade_data(cpi=cpi)

specs = {"inflation": ModelSpec("inflation", "ar1")}
table = stability("inflation", specs, data, direction="expanding_end",
                  min_obs=30, n_starts=1)

print(f"{len(table.rows)} expanding windows, params {table.param_names}")
print(f"\n{'through':>8}{'n':>5}{'mu_q':>9}{'95% ci':>20}{'a_q':>8}")
for row in table.rows[::5]:
    lo, hi = table.ci_bounds(row, "mu_q")
    ci = f"[{lo:.4f}, {hi:.4f}]" if lo is not None else "unavailable"
    print(f"{row.bound_year:>8}{row.n_window:>5}"
          f"{row.estimates['mu_q']:>9.4f}{ci:>20}"
          f"{row.estimates['a_q']:>8.3f}")

# The break sits at 1985. Windows ending there see only the old regime;
# the full sample averages the two and dresses the break up as extra
# persistence in a_q, which is exactly what a single point estimate hides.
at_break = next(r for r in table.rows if r.bound_year == 1985)
last = table.rows[-1]
print(f"\nmu_q through 1985: {at_break.estimates['mu_q']:.4f}   "
      f"full sample: {last.estimates['mu_q']:.4f}")
print(f"a_q  through 1985: {at_break.estimates['a_q']:.4f}   "
      f"full sample: {last.estimates['a_q']:.4f}")
