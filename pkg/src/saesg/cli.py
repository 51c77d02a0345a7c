"""Command-line front end: fit, diagnose, stability, simulate, backtest.

Every command reads one JSON config (see :mod:`saesg.config`), writes its
outputs under the output directory, and drops a ``manifest_<command>.json``
recording the config hash, seed and library versions plus a SHA-256 of every
output file, so reproducibility is checkable byte for byte.

Exit codes: 0 success, 2 config/data validation error, 3 numerical failure,
4 partial success (some models failed to fit, the rest were written).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .config import RunConfig, load_config, load_input_data
from .diagnostics import kpss_level
from .errors import ConfigError, DataError, FilterError, FitError, SimulationError
from .estimation import FitResult, fit
from .models import SERIES_ORDER, ModelParams
from .pipeline import UPSTREAM_FIT, filter_inputs, modelled_series, stability
from .simulation import (backtest, fan, initial_state_from_fits, neutral_state,
                         simulate)

_VALIDATION_ERRORS = (ConfigError, DataError)
_NUMERICAL_ERRORS = (FitError, FilterError, SimulationError)


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", required=True, help="path to the JSON run config")
    shared.add_argument("--out", help="output directory (overrides config output_dir)")
    shared.add_argument("--seed", type=int,
                        help="simulation seed override (unsigned 64-bit)")

    p = argparse.ArgumentParser(
        prog="saesg",
        description="Calibrate and simulate the cascade investment model")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("fit", parents=[shared],
                   help="fit every configured model in cascade order")

    d = sub.add_parser("diagnose", parents=[shared],
                       help="residual diagnostics plus a KPSS test for one series")
    d.add_argument("series", choices=SERIES_ORDER)

    s = sub.add_parser("stability", parents=[shared],
                       help="recursive sub-period fits for one series")
    s.add_argument("series", choices=SERIES_ORDER)
    s.add_argument("--direction", choices=["expanding_end", "expanding_start"])
    s.add_argument("--min-obs", type=int, dest="min_obs")

    sim = sub.add_parser("simulate", parents=[shared],
                         help="fit, then generate scenario paths and fan tables")
    sim.add_argument("--csv", action="store_true",
                     help="also write the (large) long-format scenario CSV")

    b = sub.add_parser("backtest", parents=[shared],
                       help="refit on a truncated sample and score the holdout")
    b.add_argument("--split-year", type=int, dest="split_year",
                   help="last year of the fitting sample (overrides config)")
    return p


def _out_dir(cfg: RunConfig, args) -> Path:
    out = Path(args.out) if args.out else cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fit_seed(cfg: RunConfig, args) -> int:
    return args.seed if args.seed is not None else cfg.fit_seed


def _fit_all(cfg: RunConfig, data, seed: int
             ) -> tuple[dict[str, FitResult], dict[str, str]]:
    """Fit each configured model in cascade order, capturing failures."""
    fits: dict[str, FitResult] = {}
    failures: dict[str, str] = {}
    for series in SERIES_ORDER:
        if series not in cfg.models:
            continue
        up = UPSTREAM_FIT.get(series)
        if up is not None and up not in cfg.models:
            failures[series] = (f"requires the {up!r} model: the cascade feeds "
                                f"its lagged residuals into this equation")
            continue
        if up is not None and up not in fits:
            failures[series] = f"upstream fit {up!r} failed"
            continue
        eps_y = fits[up].residuals if up is not None else None
        try:
            inputs = filter_inputs(series, data, eps_y=eps_y)
            fits[series] = fit(cfg.models[series], inputs, config=cfg.optimizer,
                               n_starts=cfg.n_starts, seed=seed,
                               ma_init=cfg.ma_init)
        except _VALIDATION_ERRORS as exc:
            failures[series] = f"validation: {exc}"
        except _NUMERICAL_ERRORS as exc:
            failures[series] = f"numerical: {exc}"
    return fits, failures


def _fmt(v, width=12) -> str:
    return f"{v:<{width}.6g}" if v is not None else " " * width


def _fit_table(fits: dict[str, FitResult], failures: dict[str, str]) -> str:
    """Human-readable parameter tables, one block per model."""
    lines = []
    for series, f in fits.items():
        res = f.residuals
        d = f.diagnostics
        lines.append(f"=== {series} / {f.spec.variant} ===")
        lines.append(f"residual years {res.start_year}-{res.end_year}  "
                     f"n = {f.n_obs}  log-likelihood = {f.log_likelihood:.4f}  "
                     f"{'converged' if f.converged else 'NOT CONVERGED'}")
        lines.append(f"{'parameter':<12}{'estimate':<14}std. error")
        for name in f.params.names:
            if name in f.params.fixed:
                se_txt = "(fixed parameter)"
            else:
                se = f.params.std_error(name)
                se_txt = f"{se:.6g}" if se is not None else "n/a"
            lines.append(f"{name:<12}{f.params[name]:<14.6g}{se_txt}")
        if f.se_warning:
            lines.append(f"note: {f.se_warning}")
        flagged = ", ".join(str(k) for k in d.flagged_lags) or "none"
        lines.append(f"r_z(1) = {d.r_z.get(1, float('nan')):.4f}  "
                     f"r_z2(1) = {d.r_z2.get(1, float('nan')):.4f}  "
                     f"flagged lags (|r| > {d.acf_flag_threshold:.3f}): {flagged}")
        lines.append(f"skewness = {d.skewness:.4f}  kurtosis = {d.kurtosis:.4f}  "
                     f"JB = {d.jarque_bera:.4f} (p = {d.jb_p_value:.4f})")
        lines.append("")
    for series, why in failures.items():
        lines.append(f"=== {series}: FAILED ===")
        lines.append(why)
        lines.append("")
    return "\n".join(lines)


def cmd_fit(cfg: RunConfig, args) -> int:
    data = load_input_data(cfg)
    out = _out_dir(cfg, args)
    seed = _fit_seed(cfg, args)
    fits, failures = _fit_all(cfg, data, seed)
    if not fits:
        for series, why in failures.items():
            print(f"{series}: {why}", file=sys.stderr)
        return 3
    written = []
    for series, f in fits.items():
        p = out / f"fit_{series}.json"
        io.write_json(p, io.fit_report(f))
        written.append(p)
    params = {s: ModelParams(f.spec, f.params) for s, f in fits.items()}
    p = out / "params.json"
    io.save_params(p, params)
    written.append(p)
    table = _fit_table(fits, failures)
    p = out / "fit_report.txt"
    p.write_text(table, encoding="utf-8")
    written.append(p)
    print(table)
    io.write_manifest(out / "manifest_fit.json", "fit", seed,
                      config_path=args.config, outputs=written)
    for w in written:
        print(f"wrote {w}")
    if failures:
        for series, why in failures.items():
            print(f"{series}: {why}", file=sys.stderr)
        return 4
    return 0


def cmd_diagnose(cfg: RunConfig, args) -> int:
    series = args.series
    if series not in cfg.models:
        raise ConfigError(f"models.{series}: not configured")
    data = load_input_data(cfg)
    out = _out_dir(cfg, args)
    seed = _fit_seed(cfg, args)
    fits, failures = _fit_all(cfg, data, seed)
    if series not in fits:
        print(f"{series}: {failures.get(series, 'fit failed')}", file=sys.stderr)
        return 3
    f = fits[series]
    kpss = kpss_level(modelled_series(series, data).values)
    doc = {"series": series, "variant": f.spec.variant,
           "kpss_statistic": kpss.statistic, "kpss_bandwidth": kpss.bandwidth}
    for level, cv in kpss.critical_values.items():
        doc[f"kpss_critical_{level}"] = cv
    for level, rej in kpss.reject.items():
        doc[f"kpss_reject_{level}"] = rej
    doc.update(f.diagnostics.as_dict())
    p = out / f"diagnose_{series}.json"
    io.write_json(p, doc)
    io.write_manifest(out / "manifest_diagnose.json", "diagnose", seed,
                      config_path=args.config, outputs=[p])
    verdict = {level: ("reject level-stationarity" if rej else "consistent with "
                       "level-stationarity") for level, rej in kpss.reject.items()}
    print(f"{series}: KPSS = {kpss.statistic:.4f} "
          f"(bandwidth {kpss.bandwidth}); " +
          "; ".join(f"{lvl}: {v}" for lvl, v in verdict.items()))
    print(f"wrote {p}")
    return 0


def cmd_stability(cfg: RunConfig, args) -> int:
    series = args.series
    if series not in cfg.models:
        raise ConfigError(f"models.{series}: not configured")
    data = load_input_data(cfg)
    out = _out_dir(cfg, args)
    direction = args.direction or cfg.stability.direction
    min_obs = args.min_obs or cfg.stability.min_obs
    seed = _fit_seed(cfg, args)
    table = stability(series, cfg.models, data, direction, min_obs,
                      config=cfg.optimizer, n_starts=cfg.n_starts,
                      seed=seed, warm_start=cfg.stability.warm_start,
                      ma_init=cfg.ma_init)
    csv_p = out / f"stability_{series}.csv"
    io.write_stability_csv(table, csv_p)
    json_p = out / f"stability_{series}.json"
    io.write_json(json_p, io.stability_document(table))
    io.write_manifest(out / "manifest_stability.json", "stability", seed,
                      config_path=args.config, outputs=[csv_p, json_p],
                      extra={"series": series, "direction": direction,
                             "min_obs": min_obs})
    n_ok = sum(r.converged for r in table.rows)
    print(f"{series}: {len(table.rows)} sub-period fits "
          f"({direction}, min_obs = {min_obs}), {n_ok} converged")
    print(f"wrote {csv_p}")
    print(f"wrote {json_p}")
    return 0


def cmd_simulate(cfg: RunConfig, args) -> int:
    data = load_input_data(cfg)
    out = _out_dir(cfg, args)
    fits, failures = _fit_all(cfg, data, cfg.fit_seed)
    if failures:
        for series, why in failures.items():
            print(f"{series}: {why}", file=sys.stderr)
        return 3
    seed = args.seed if args.seed is not None else cfg.simulation.seed
    params = {s: ModelParams(f.spec, f.params) for s, f in fits.items()}
    if cfg.simulation.initial_state == "neutral":
        state, first_year = neutral_state(params), None
    else:
        state = initial_state_from_fits(fits)
        first_year = max(f.final_year for f in fits.values()) + 1
    scen = simulate(params, state, cfg.simulation.horizon, cfg.simulation.n_paths,
                    seed, base_cpi=cfg.simulation.base_cpi,
                    base_price=cfg.simulation.base_price,
                    yield_scale=cfg.yield_scale, first_year=first_year,
                    workers=cfg.simulation.workers)
    ftab = fan(scen)
    written = []
    p = out / "params.json"
    io.save_params(p, params)
    written.append(p)
    p = out / "scenarios.bin"
    io.write_scenarios_binary(scen, p)
    written.append(p)
    if args.csv:
        p = out / "scenarios.csv"
        io.write_scenarios_csv(scen, p)
        written.append(p)
    p = out / "fan.csv"
    io.write_fan_csv(ftab, p)
    written.append(p)
    io.write_manifest(out / "manifest_simulate.json", "simulate", seed,
                      config_path=args.config, outputs=written,
                      extra={"n_paths": cfg.simulation.n_paths,
                             "horizon": cfg.simulation.horizon})
    print(f"simulated {scen.n_paths} paths x {scen.horizon} years "
          f"(seed {seed}), series: {', '.join(scen.series)}")
    for w in written:
        print(f"wrote {w}")
    return 0


def cmd_backtest(cfg: RunConfig, args) -> int:
    data = load_input_data(cfg)
    out = _out_dir(cfg, args)
    split_year = args.split_year if args.split_year is not None \
        else cfg.backtest.split_year
    if split_year is None:
        raise ConfigError("backtest.split_year: set it in the config or pass "
                          "--split-year")
    seed = args.seed if args.seed is not None else cfg.simulation.seed
    report = backtest(data, cfg.models, split_year,
                      horizon=cfg.backtest.horizon,
                      n_paths=cfg.backtest.n_paths, seed=seed,
                      include_ilb=cfg.backtest.include_ilb,
                      config=cfg.optimizer, n_starts=cfg.n_starts,
                      ma_init=cfg.ma_init, workers=cfg.simulation.workers)
    written = []
    p = out / "backtest.json"
    io.write_json(p, io.backtest_document(report))
    written.append(p)
    p = out / "backtest_fan.csv"
    io.write_fan_csv(report.fan_table, p)
    written.append(p)
    io.write_manifest(out / "manifest_backtest.json", "backtest", seed,
                      config_path=args.config, outputs=written,
                      extra={"split_year": split_year})
    for name in report.coverage_95:
        n = len(report.rows[name])
        print(f"{name}: {n} holdout years, "
              f"95% coverage {report.coverage_95[name]:.2f}, "
              f"99% coverage {report.coverage_99[name]:.2f}")
    for w in written:
        print(f"wrote {w}")
    return 0


_COMMANDS = {"fit": cmd_fit, "diagnose": cmd_diagnose, "stability": cmd_stability,
             "simulate": cmd_simulate, "backtest": cmd_backtest}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return _COMMANDS[args.command](cfg, args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
