"""File formats: wide CSV input, flat ``key = value`` configuration."""
from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .core import MiningConfig, Mode, Pruning
from .transform import AlphabetSpec, IngestionError, RawSeries, SymbolicDatabase, SymbolicSeries, symbolize

__all__ = [
    "ConfigError",
    "RunConfig",
    "read_flat_config",
    "read_wide_csv",
    "load_symbolic_database",
    "running_example",
    "RUNNING_EXAMPLE",
]


class ConfigError(ValueError):
    pass


def read_flat_config(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are skipped."""
    items: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        if key in items:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        items[key] = val.strip()
    return items


def read_wide_csv(path) -> tuple[np.ndarray, dict[str, list[str]]]:
    """Read ``timestamp,<series>...``; errors name the offending file row."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if not header or header[0] != "timestamp":
            raise IngestionError(f"{path}:1: first column must be 'timestamp'")
        if len(header) < 2:
            raise IngestionError(f"{path}:1: no series columns")
        if len(set(header)) != len(header):
            raise IngestionError(f"{path}:1: duplicate column names")
        ts: list[int] = []
        cols: dict[str, list[str]] = {h: [] for h in header[1:]}
        for rowno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise IngestionError(f"{path}:{rowno}: expected {len(header)} fields, got {len(row)}")
            try:
                t = int(row[0])
            except ValueError:
                raise IngestionError(f"{path}:{rowno}: timestamp {row[0]!r} is not an integer") from None
            if ts and t <= ts[-1]:
                raise IngestionError(f"{path}:{rowno}: timestamps must be strictly increasing")
            if len(ts) >= 2 and t - ts[-1] != ts[1] - ts[0]:
                raise IngestionError(f"{path}:{rowno}: irregular sampling interval")
            ts.append(t)
            for h, v in zip(header[1:], row[1:]):
                v = v.strip()
                if not v:
                    raise IngestionError(f"{path}:{rowno}: missing value for {h}")
                cols[h].append(v)
    if not ts:
        raise IngestionError(f"{path}: no data rows")
    return np.asarray(ts, dtype=np.int64), cols


def _is_numeric(values: list[str]) -> bool:
    try:
        for v in values:
            float(v)
    except ValueError:
        return False
    return True


def parse_alphabet(text: str) -> AlphabetSpec:
    """``quantile:3``, ``quantile:Low,Mid,High`` or ``Off,On @ 0.5`` (symbols @ thresholds)."""
    text = text.strip()
    if text.startswith("quantile:"):
        arg = text[len("quantile:"):].strip()
        if arg.isdigit():
            return AlphabetSpec.quantiles(int(arg))
        return AlphabetSpec(tuple(s.strip() for s in arg.split(",")))
    syms, sep, thr = text.partition("@")
    if not sep:
        raise ConfigError(f"alphabet {text!r}: expected 'quantile:N' or 'symbols @ thresholds'")
    return AlphabetSpec(tuple(s.strip() for s in syms.split(",")), tuple(float(t) for t in thr.split(",")))


@dataclass
class RunConfig:
    """Everything one ``mine`` run needs; unknown keys are rejected."""

    input: Optional[str] = None
    window: Optional[int] = None
    overlap: int = 0
    t_max: Optional[int] = None
    epsilon: int = 0
    d_o: int = 1
    sigma_min: float = 0.5
    sigma_max: Optional[float] = None
    delta: float = 0.5
    mode: str = "frequent"
    pruning: str = "all"
    max_pattern_len: int = 5
    method: str = "exact"
    output: str = "out"
    seed: int = 0
    alphabet: str = "quantile:3"
    alphabets: dict[str, str] = field(default_factory=dict)

    _TYPES = {"input": str, "window": int, "overlap": int, "t_max": int, "epsilon": int, "d_o": int,
              "sigma_min": float, "sigma_max": float, "delta": float, "mode": str, "pruning": str,
              "max_pattern_len": int, "method": str, "output": str, "seed": int, "alphabet": str}

    @classmethod
    def from_items(cls, items: dict[str, str], base: Optional["RunConfig"] = None) -> "RunConfig":
        cfg = dataclasses.replace(base) if base else cls()
        cfg.alphabets = dict(cfg.alphabets)
        for key, val in items.items():
            if key.startswith("alphabet."):
                cfg.alphabets[key[len("alphabet."):]] = val
                continue
            typ = cls._TYPES.get(key)
            if typ is None:
                raise ConfigError(f"unknown config key {key!r}")
            if val is None:
                continue
            if isinstance(val, str) and val.lower() in ("none", "inf", "") and key in ("sigma_max", "t_max", "window"):
                setattr(cfg, key, None)
                continue
            try:
                setattr(cfg, key, typ(val))
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {val!r}") from None
        cfg.validate()
        return cfg

    def validate(self):
        if self.method not in ("exact", "approximate", "both"):
            raise ConfigError("method must be exact, approximate or both")
        try:
            Mode(self.mode)
            Pruning(self.pruning)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.mining_config()

    def mining_config(self) -> MiningConfig:
        kw = dict(sigma_min=self.sigma_min, sigma_max=self.sigma_max, delta=self.delta, epsilon=self.epsilon,
                  d_o=self.d_o, mode=self.mode, pruning=self.pruning, max_pattern_len=self.max_pattern_len)
        if self.t_max is not None:
            kw["t_max"] = self.t_max
        try:
            return MiningConfig(**kw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def load_symbolic_database(path, cfg: RunConfig) -> SymbolicDatabase:
    """Read a wide CSV; numeric columns are symbolized, string columns are used as-is."""
    ts, cols = read_wide_csv(path)
    series = []
    for sid, values in cols.items():
        if _is_numeric(values):
            spec = parse_alphabet(cfg.alphabets.get(sid, cfg.alphabet))
            raw = RawSeries(sid, ts, np.asarray(values, dtype=float))
            series.append(symbolize(raw, spec))
        else:
            alphabet = ()
            if sid in cfg.alphabets:
                alphabet = tuple(s.strip() for s in cfg.alphabets[sid].split("@")[0].split(","))
            else:
                alphabet = tuple(sorted(set(values)))
            series.append(SymbolicSeries(sid, ts, np.asarray(values, dtype=object), alphabet))
    return SymbolicDatabase(tuple(series))


RUNNING_EXAMPLE = "running_example.csv"


def running_example() -> SymbolicDatabase:
    """The bundled four-appliance on/off example: 36 samples every 5 minutes from 10:00.

    Timestamps are minutes since midnight.
    """
    ref = resources.files("tpmine.data").joinpath(RUNNING_EXAMPLE)
    with resources.as_file(ref) as path:
        return load_symbolic_database(path, RunConfig(alphabets={c: "Off,On @ 0.5" for c in "STWI"}))


def running_example_path() -> str:
    return str(resources.files("tpmine.data").joinpath(RUNNING_EXAMPLE))
