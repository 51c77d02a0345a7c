# The batch workflow: a JSON run config plus year,value CSVs in, report
# files out. This drives the command line entry points in-process via
# saesg.cli.main, which is exactly what the installed `saesg` script
# calls, so the same artifacts appear if you run the commands from a
# shell instead.

import json
import tempfile
from pathlib import Path

import numpy as np

from saesg import ModelParams, ModelSpec, ParamSet, neutral_state, simulate
from saesg.cli import main
from saesg.io import read_json

CALIBRATION = {
    ("inflation", "ar1"): {"mu_q": 0.0809, "a_q": 0.8433, "sigma_q": 0.0220},
    ("long_rate", "ar1_log"): {"mu_c": 0.1174, "a_c": 0.9328,
                               "sigma_c": 0.0115},
    ("short_rate", "ar1_spread"): {"mu_b": 0.1568, "a_b": 0.5527,
                                   "sigma_b": 0.1996},
}
params = {}
for (series, variant), values in CALIBRATION.items():
    spec = ModelSpec(series, variant)
    params[series] = ModelParams(spec, ParamSet.from_dict(spec, values))

ws = Path(tempfile.mkdtemp(prefix="saesg_demo_"))
print("workspace:", ws)

# Sixty years of synthetic data, written the way a vendor would ship it.
scen = simulate(params, neutral_state(params), horizon=60, n_paths=1,
                seed=23, first_year=1960)
path = {k: v[0] for k, v in scen.series.items()}


def write_csv(name, start_year, values):
    lines = ["year,value"] + [f"{start_year + i},{float(v)!r}"
                              for i, v in enumerate(values)]
    (ws / name).write_text("\n".join(lines) + "\n")


write_csv("cpi.csv", 1959, np.r_[100.0, path["cpi_index"]])
write_csv("long_rate.csv", 1960, path["long_rate"] * 100.0)
write_csv("money_market.csv", 1959,
          100.0 * np.r_[1.0, np.exp(np.cumsum(path["short_rate"]))])

config = {
    "data": {
        "cpi": {"path": "cpi.csv", "unit": "index"},
        "long_rate": {"path": "long_rate.csv", "unit": "percent"},
        "money_market_index": {"path": "money_market.csv", "unit": "index"},
    },
    "models": {
        "inflation": {"variant": "ar1"},
        "long_rate": {"variant": "ar1_log"},
        "short_rate": {"variant": "ar1_spread"},
    },
    "optimizer": {"n_starts": 3, "seed": 0},
    "simulation": {"seed": 404, "n_paths": 5000, "horizon": 10,
                   "initial_state": "from_fit"},
    "backtest": {"horizon": 10, "n_paths": 5000},
    "output_dir": "out",
}
(ws / "run.json").write_text(json.dumps(config, indent=2))

# 1. Calibrate. Writes fit_<series>.json, params.json, fit_report.txt
#    and a manifest with sha256 digests of everything it produced.
code = main(["fit", "--config", str(ws / "run.json")])
print("\nfit exit code:", code)
fitted = read_json(ws / "out" / "params.json")
print("params.json models:", ", ".join(sorted(fitted["models"])))

# 2. Residual diagnostics for one series.
main(["diagnose", "inflation", "--config", str(ws / "run.json")])
diag = read_json(ws / "out" / "diagnose_inflation.json")
print("\ninflation diagnostics: jb p-value "
      f"{diag['jb_p_value']:.3f}, "
      f"kpss statistic {diag['kpss_statistic']:.3f}")

# 3. Project forward. scenarios.bin holds the full path array; fan.csv
#    is the quantile summary most reports actually want.
main(["simulate", "--config", str(ws / "run.json")])
fan_lines = (ws / "out" / "fan.csv").read_text().splitlines()
print("\nfan.csv:", fan_lines[0])
for line in fan_lines[1:4]:
    print("        ", line)

# 4. Backtest against the last decade of the data.
main(["backtest", "--split-year", "2009", "--config", str(ws / "run.json")])
bt = read_json(ws / "out" / "backtest.json")
print("\nbacktest 95% coverage:",
      {k: round(v, 2) for k, v in bt["coverage_95"].items()})

print("\nartifacts in", ws / "out")
for p in sorted((ws / "out").iterdir()):
    print("  ", p.name)
