"""Experiment configuration and its flat ``key = value`` file format.

Example::

    # AR1, one-step-ahead
    dataset = ar1
    T = 15
    H = 1
    models = esc, es, sc, scn, rvfl
    lambdas = 0.5, 1, 3, 5, 10, 30, 50, 100
    repeats = 10

Values are typed by the matching field of :class:`ExperimentConfig`; tuple
fields take comma-separated items. Unknown keys are an error.
"""
from __future__ import annotations

import dataclasses
import json
import typing
from dataclasses import dataclass, field
from pathlib import Path

from ..baselines import DEFAULT_LAMBDAS, DEFAULT_RATES

MODEL_NAMES = ("esc", "es", "sc", "scn", "rvfl")
HORIZONS = (1, 3, 6)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = "ar1"              # ar1 | csv
    csv_path: str = ""
    csv_column: str = "0"             # header name or zero-based index
    ar1_n: int = 500
    ar1_alpha: float = 0.01
    ar1_noise: float = 0.25
    ar1_x0: float = 0.0
    data_seed: int = 0
    resample_per_repeat: bool = True  # ar1 only: repeat k uses series seed data_seed + k
    T: int = 15
    H: int = 1
    K_p: int = 3
    K_m: int = 0                      # 0 -> floor(T / 4)
    models: tuple = MODEL_NAMES
    C_max: int = 50
    epsilon: float = 0.0
    lambdas: tuple = DEFAULT_LAMBDAS
    rates: tuple = DEFAULT_RATES
    S: int = 300
    es_lambda: float = 1.0
    rvfl_lambda: float = 1.0
    u_g: float = 1.0
    margin_mode: str = "typeset"
    repeats: int = 10
    seed: int = 0                     # repeat k uses model seed seed + k
    scale_fit: str = "train-only"     # train-only | full-series
    metric_space: str = "scaled"      # scaled | original
    output_dir: str = "runs/latest"
    jobs: int = 1
    horizons: tuple = field(default=HORIZONS)

    def validate(self, check_files: bool = True) -> "ExperimentConfig":
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")
        if self.H not in self.horizons:
            raise ConfigError(f"H={self.H} not in declared horizons {self.horizons}")
        if self.dataset not in ("ar1", "csv"):
            raise ConfigError(f"dataset must be 'ar1' or 'csv', got {self.dataset!r}")
        if self.dataset == "csv" and check_files and not Path(self.csv_path).is_file():
            raise ConfigError(f"csv_path {self.csv_path!r} does not exist")
        bad = [m for m in self.models if m not in MODEL_NAMES]
        if bad or not self.models:
            raise ConfigError(f"unknown models {bad}; choose from {MODEL_NAMES}")
        if self.scale_fit not in ("train-only", "full-series"):
            raise ConfigError(f"scale_fit must be train-only or full-series, got {self.scale_fit!r}")
        if self.metric_space not in ("scaled", "original"):
            raise ConfigError(f"metric_space must be scaled or original, got {self.metric_space!r}")
        if self.margin_mode not in ("typeset", "normalized"):
            raise ConfigError(f"margin_mode must be typeset or normalized, got {self.margin_mode!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        return self

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in dataclasses.asdict(self).items()}

    def dumps(self) -> str:
        lines = []
        for k, v in self.to_dict().items():
            if isinstance(v, list):
                v = ", ".join(str(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"


_HINTS = typing.get_type_hints(ExperimentConfig)
_TUPLE_ITEM = {"models": str, "lambdas": float, "rates": float, "horizons": int}


def _coerce(key: str, raw):
    if key not in _HINTS:
        raise ConfigError(f"unknown config key {key!r}")
    kind = _HINTS[key]
    if isinstance(raw, (list, tuple)) and kind is tuple:
        return tuple(_TUPLE_ITEM[key](x) for x in raw)
    if not isinstance(raw, str):
        return kind(raw) if kind is not tuple else (raw,)
    text = raw.strip()
    try:
        if kind is bool:
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is tuple:
            return tuple(_TUPLE_ITEM[key](x.strip()) for x in text.split(",") if x.strip())
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        return text
    except ValueError:
        raise ConfigError(f"cannot parse {key} = {raw!r} as {kind.__name__}") from None


def parse_pairs(text: str, source: str = "<config>") -> dict:
    out = {}
    for no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{no}: expected 'key = value', got {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key] = _coerce(key, val)
    return out


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    values = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {path} not found")
        values.update(parse_pairs(path.read_text(), str(path)))
    for k, v in (overrides or {}).items():
        values[k] = _coerce(k, v)
    return ExperimentConfig(**values)


def config_from_dict(d: dict) -> ExperimentConfig:
    return ExperimentConfig(**{k: _coerce(k, v) for k, v in d.items()})


def dump_json(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)
