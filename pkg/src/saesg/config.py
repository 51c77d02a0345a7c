"""Declarative run configuration: one JSON file drives every command.

Schema (all sections optional except ``data.cpi`` for commands that fit):

    {
      "data": {
        "cpi":                {"path": "cpi.csv", "unit": "index"},
        "share_price":        {"path": "px.csv", "unit": "index"},
        "dividend_yield":     {"path": "dy.csv", "unit": "percent"},
        "long_rate":          {"path": "long.csv", "unit": "decimal"},
        "money_market_index": {"path": "mm.csv", "unit": "index"},
        "ilb_yields":         {"path": "ilb.csv", "unit": "percent"}
      },
      "yield_scale": "percent",
      "models": {
        "inflation":      {"variant": "ar1"},
        "dividend_yield": {"variant": "ma_inflation"},
        "dividend":       {"variant": "ma_inflation"},
        "long_rate":      {"variant": "ma_inflation",
                           "fixed": {"w_c": 1.0, "d_c": 0.13}},
        "short_rate":     {"variant": "ar1_spread"},
        "ilb":            {"variant": "short_no_mean"}
      },
      "ma_init": null,
      "optimizer": {"n_starts": 5, "seed": 0, "max_iter": 50000,
                    "f_tol": 1e-10, "x_tol": 1e-8, "restarts": 2},
      "simulation": {"seed": 1, "n_paths": 100000, "horizon": 10,
                     "base_cpi": 100.0, "base_price": 100.0,
                     "initial_state": "from_fit", "workers": 1},
      "stability": {"direction": "expanding_end", "min_obs": 25,
                    "warm_start": true},
      "backtest": {"split_year": 2008, "horizon": 10, "n_paths": 100000,
                   "include_ilb": false},
      "output_dir": "out"
    }

Paths are resolved relative to the config file. ``fixed`` entries pin
parameters during estimation (they are reported as fixed, with no standard
error). An ``ilb_yields`` file with a ``series`` column is read as a panel
of issues and averaged per year; without one it is a single yield series.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, DataError
from .estimation import OptimizerConfig
from .models import ModelSpec, SERIES_ORDER
from .pipeline import CascadeData, build_cascade_data
from .series import Unit, load_multi_series, load_series

_UNITS = {"index": Unit.INDEX_LEVEL, "percent": Unit.RATE_PERCENT,
          "decimal": Unit.RATE_DECIMAL}
_DATA_KEYS = ("cpi", "share_price", "dividend_yield", "long_rate",
              "money_market_index", "ilb_yields")
_TOP_KEYS = {"data", "yield_scale", "models", "ma_init", "optimizer",
             "simulation", "stability", "backtest", "output_dir"}


@dataclass
class DataEntry:
    path: Path
    unit: Unit


@dataclass
class SimulationSettings:
    seed: int = 1
    n_paths: int = 100_000
    horizon: int = 10
    base_cpi: float = 100.0
    base_price: float = 100.0
    initial_state: str = "from_fit"
    workers: int = 1


@dataclass
class StabilitySettings:
    direction: str = "expanding_end"
    min_obs: int = 25
    warm_start: bool = True


@dataclass
class BacktestSettings:
    split_year: int | None = None
    horizon: int = 10
    n_paths: int = 100_000
    include_ilb: bool = False


@dataclass
class RunConfig:
    data: dict[str, DataEntry] = field(default_factory=dict)
    yield_scale: str = "percent"
    models: dict[str, ModelSpec] = field(default_factory=dict)
    ma_init: float | None = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    n_starts: int = 5
    fit_seed: int = 0
    simulation: SimulationSettings = field(default_factory=SimulationSettings)
    stability: StabilitySettings = field(default_factory=StabilitySettings)
    backtest: BacktestSettings = field(default_factory=BacktestSettings)
    output_dir: Path = Path("out")


def _expect(mapping, key, types, where, default=None, required=False):
    if key not in mapping:
        if required:
            raise ConfigError(f"{where}: missing required key {key!r}")
        return default
    v = mapping[key]
    if types is not None and not isinstance(v, types):
        raise ConfigError(f"{where}.{key}: expected {types}, got {type(v).__name__}")
    # bools pass isinstance(int) checks; reject them where ints are wanted
    if types is not None and isinstance(v, bool) and bool not in (
            types if isinstance(types, tuple) else (types,)):
        raise ConfigError(f"{where}.{key}: expected a number, got a boolean")
    return v


def load_config(path) -> RunConfig:
    """Parse and validate a config file; all errors carry the field path."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    base = path.parent
    cfg = RunConfig()

    data = _expect(raw, "data", dict, "config", {})
    for key, entry in data.items():
        if key not in _DATA_KEYS:
            raise ConfigError(f"data.{key}: unknown series; choose from {_DATA_KEYS}")
        if not isinstance(entry, dict):
            raise ConfigError(f"data.{key}: expected an object with path/unit")
        p = _expect(entry, "path", str, f"data.{key}", required=True)
        unit = _expect(entry, "unit", str, f"data.{key}", required=True)
        if unit not in _UNITS:
            raise ConfigError(
                f"data.{key}.unit: unknown unit {unit!r}; "
                f"choose from {sorted(_UNITS)}")
        extra = set(entry) - {"path", "unit"}
        if extra:
            raise ConfigError(f"data.{key}: unknown keys {sorted(extra)}")
        resolved = (base / p).resolve()
        if not resolved.exists():
            raise ConfigError(f"data.{key}.path: file not found: {resolved}")
        cfg.data[key] = DataEntry(resolved, _UNITS[unit])

    cfg.yield_scale = _expect(raw, "yield_scale", str, "config", "percent")
    if cfg.yield_scale not in ("percent", "decimal"):
        raise ConfigError(f"yield_scale: must be 'percent' or 'decimal', "
                          f"got {cfg.yield_scale!r}")

    models = _expect(raw, "models", dict, "config", {})
    for series, entry in models.items():
        if not isinstance(entry, dict):
            raise ConfigError(f"models.{series}: expected an object")
        variant = _expect(entry, "variant", str, f"models.{series}", required=True)
        fixed = _expect(entry, "fixed", dict, f"models.{series}", {})
        extra = set(entry) - {"variant", "fixed"}
        if extra:
            raise ConfigError(f"models.{series}: unknown keys {sorted(extra)}")
        for k, v in fixed.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"models.{series}.fixed.{k}: expected a number")
        try:
            cfg.models[series] = ModelSpec(series, variant,
                                           {k: float(v) for k, v in fixed.items()})
        except DataError as exc:
            raise ConfigError(f"models.{series}: {exc}") from None

    ma = raw.get("ma_init")
    if ma is not None:
        if not isinstance(ma, (int, float)) or isinstance(ma, bool):
            raise ConfigError("ma_init: expected a number or null")
        cfg.ma_init = float(ma)

    opt = _expect(raw, "optimizer", dict, "config", {})
    cfg.n_starts = int(_expect(opt, "n_starts", int, "optimizer", 5))
    cfg.fit_seed = int(_expect(opt, "seed", int, "optimizer", 0))
    kw = {}
    for key in ("max_iter", "restarts"):
        if key in opt:
            kw[key] = int(_expect(opt, key, int, "optimizer"))
    for key in ("f_tol", "x_tol", "initial_step"):
        if key in opt:
            kw[key] = float(_expect(opt, key, (int, float), "optimizer"))
    extra = set(opt) - {"n_starts", "seed", "max_iter", "f_tol", "x_tol",
                        "restarts", "initial_step"}
    if extra:
        raise ConfigError(f"optimizer: unknown keys {sorted(extra)}")
    cfg.optimizer = OptimizerConfig(**kw)

    sim = _expect(raw, "simulation", dict, "config", {})
    extra = set(sim) - {"seed", "n_paths", "horizon", "base_cpi", "base_price",
                        "initial_state", "workers"}
    if extra:
        raise ConfigError(f"simulation: unknown keys {sorted(extra)}")
    s = SimulationSettings()
    s.seed = int(_expect(sim, "seed", int, "simulation", s.seed))
    s.n_paths = int(_expect(sim, "n_paths", int, "simulation", s.n_paths))
    s.horizon = int(_expect(sim, "horizon", int, "simulation", s.horizon))
    s.base_cpi = float(_expect(sim, "base_cpi", (int, float), "simulation", s.base_cpi))
    s.base_price = float(_expect(sim, "base_price", (int, float), "simulation",
                                 s.base_price))
    s.initial_state = _expect(sim, "initial_state", str, "simulation", s.initial_state)
    if s.initial_state not in ("from_fit", "neutral"):
        raise ConfigError(f"simulation.initial_state: must be 'from_fit' or "
                          f"'neutral', got {s.initial_state!r}")
    s.workers = int(_expect(sim, "workers", int, "simulation", s.workers))
    cfg.simulation = s

    st = _expect(raw, "stability", dict, "config", {})
    extra = set(st) - {"direction", "min_obs", "warm_start"}
    if extra:
        raise ConfigError(f"stability: unknown keys {sorted(extra)}")
    t = StabilitySettings()
    t.direction = _expect(st, "direction", str, "stability", t.direction)
    if t.direction not in ("expanding_end", "expanding_start"):
        raise ConfigError(f"stability.direction: must be 'expanding_end' or "
                          f"'expanding_start', got {t.direction!r}")
    t.min_obs = int(_expect(st, "min_obs", int, "stability", t.min_obs))
    t.warm_start = bool(_expect(st, "warm_start", bool, "stability", t.warm_start))
    cfg.stability = t

    bt = _expect(raw, "backtest", dict, "config", {})
    extra = set(bt) - {"split_year", "horizon", "n_paths", "include_ilb"}
    if extra:
        raise ConfigError(f"backtest: unknown keys {sorted(extra)}")
    b = BacktestSettings()
    if bt.get("split_year") is not None:
        b.split_year = int(_expect(bt, "split_year", int, "backtest"))
    b.horizon = int(_expect(bt, "horizon", int, "backtest", b.horizon))
    b.n_paths = int(_expect(bt, "n_paths", int, "backtest", b.n_paths))
    b.include_ilb = bool(_expect(bt, "include_ilb", bool, "backtest", b.include_ilb))
    cfg.backtest = b

    out_dir = _expect(raw, "output_dir", str, "config", "out")
    cfg.output_dir = (base / out_dir).resolve()
    return cfg


def _has_series_column(path: Path) -> bool:
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), [])
    return "series" in [h.strip() for h in header]


def load_input_data(cfg: RunConfig) -> CascadeData:
    """Read every configured raw file and build the modelled series."""
    if "cpi" not in cfg.data:
        raise ConfigError("data.cpi is required to build the cascade "
                          "(inflation drives every other model)")

    def read(key):
        entry = cfg.data.get(key)
        if entry is None:
            return None
        return load_series(entry.path, entry.unit, name=key)

    ilb = None
    entry = cfg.data.get("ilb_yields")
    if entry is not None:
        if _has_series_column(entry.path):
            ilb = list(load_multi_series(entry.path, entry.unit).values())
        else:
            ilb = [load_series(entry.path, entry.unit, name="ilb_yields")]
    return build_cascade_data(cpi=read("cpi"), share_price=read("share_price"),
                              dividend_yield=read("dividend_yield"),
                              long_rate=read("long_rate"),
                              money_market_index=read("money_market_index"),
                              ilb_yields=ilb, yield_scale=cfg.yield_scale)
