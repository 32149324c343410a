"""Shared fixtures-as-functions: the appliance example and random small instances."""
from __future__ import annotations

import random

import numpy as np

from tpmine.core import EventInstance, EventType, MiningConfig, SequenceDatabase, TemporalSequence
from tpmine.io import running_example
from tpmine.transform import SymbolicDatabase, build_sequence_db

EXAMPLE_WINDOW = 45
EXAMPLE_T_MAX = 45


def example_sequences() -> SequenceDatabase:
    return build_sequence_db(running_example(), EXAMPLE_WINDOW, 0, EXAMPLE_T_MAX)


def ev(series: str, symbol: str) -> EventType:
    return EventType(series, symbol)


def inst(series: str, symbol: str, start: int, end: int) -> EventInstance:
    return EventInstance.of(EventType(series, symbol), start, end)


def seq_db(*sequences) -> SequenceDatabase:
    return SequenceDatabase(tuple(TemporalSequence(i, tuple(s)) for i, s in enumerate(sequences)))


def _runs(rng: random.Random, n: int, symbols: list[str], max_run: int) -> list[str]:
    out: list[str] = []
    while len(out) < n:
        out.extend([rng.choice(symbols)] * rng.randint(1, max_run))
    return out[:n]


def random_symbolic(rng: random.Random) -> tuple[SymbolicDatabase, int]:
    """At most 6 series, 30 windows and 12 distinct events; some series are noisy copies."""
    n_series = rng.randint(1, 6)
    symbols = ["a", "b"] if n_series > 4 or rng.random() < 0.6 else ["a", "b", "c"]
    n_windows = rng.randint(1, 30)
    window = rng.randint(4, 10)
    n = n_windows * window
    cols: dict[str, list[str]] = {}
    for s in range(n_series):
        if cols and rng.random() < 0.4:
            src = cols[rng.choice(sorted(cols))]
            flip = rng.choice([0.0, 0.05, 0.2])
            cols[f"x{s}"] = [rng.choice(symbols) if rng.random() < flip else v for v in src]
        else:
            cols[f"x{s}"] = _runs(rng, n, symbols, rng.randint(1, 6))
    alphabets = {sid: tuple(symbols) for sid in cols}
    return SymbolicDatabase.from_rows(np.arange(n), cols, alphabets), window


def random_config(rng: random.Random, window: int, **overrides) -> MiningConfig:
    eps = rng.choice([0, 1, 2])
    mode = rng.choice(["frequent", "rare"])
    sigma_min = rng.choice([0.1, 0.2, 0.3, 0.5])
    kw = dict(
        sigma_min=sigma_min,
        delta=rng.choice([0.0, 0.3, 0.6]),
        epsilon=eps,
        d_o=eps + rng.randint(1, 3),
        t_max=rng.choice([max(1, window // 2), window]),
        mode=mode,
        max_pattern_len=3,
    )
    if mode == "rare":
        kw["sigma_max"] = rng.choice([sigma_min, 0.5, 0.8, 1.0]) if sigma_min <= 0.5 else 1.0
    kw.update(overrides)
    return MiningConfig(**kw)


def oracle_instances(count: int, seed: int = 0):
    """Yield ``(symbolic_db, sequence_db, window, config)`` for ``count`` seeded draws."""
    rng = random.Random(seed)
    for _ in range(count):
        db_syb, window = random_symbolic(rng)
        cfg = random_config(rng, window)
        yield db_syb, build_sequence_db(db_syb, window, 0, cfg.t_max), window, cfg
