"""Seeded synthetic symbolic databases with known structure.

Three kinds of series are produced:

* noise series: independent run-length processes over the alphabet;
* correlated blocks: copies of one shared latent stream, each sample
  flipped to another symbol with a per-block probability;
* plant series: binary ``off``/``on`` series that stay ``off`` except for
  planted chains of ``on`` intervals with prescribed relations.

The manifest records every planted occurrence so recall can be replayed.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .core import EventInstance, EventType, RelationKind, TemporalPattern, classify_relation, pair_slots
from .transform import SymbolicDatabase, SymbolicSeries

__all__ = ["BlockSpec", "PlantSpec", "GenSpec", "generate", "write_csv", "parse_gen_spec"]


@dataclass(frozen=True)
class BlockSpec:
    size: int
    flip_rate: float = 0.0

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("block size must be positive")
        if not 0.0 <= self.flip_rate <= 1.0:
            raise ValueError("flip_rate must lie in [0, 1]")


@dataclass(frozen=True)
class PlantSpec:
    """A chain of ``on`` intervals, one per plant series.

    ``relations[i]`` links element ``i`` to element ``i + 1``; relations
    between non-adjacent elements follow from the geometry and are listed
    in the manifest. ``duration`` is the length of each element in
    samples, ``rate`` the fraction of windows that receive an occurrence.
    A straddling occurrence is cut by a window boundary in the gap after
    ``straddle_after`` elements (default: the middle), which requires that
    gap to be a Follows.
    """

    relations: tuple[RelationKind, ...]
    duration: int = 2
    rate: float = 1.0
    straddle: bool = False
    straddle_after: Optional[int] = None

    def __post_init__(self):
        rels = tuple(RelationKind.parse(r) if isinstance(r, str) else RelationKind(r) for r in self.relations)
        object.__setattr__(self, "relations", rels)
        if not rels:
            raise ValueError("a plant needs at least two elements (one relation)")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("plant rate must lie in [0, 1]")
        if self.duration < 1:
            raise ValueError("plant duration must be positive")
        if any(b <= a for a, b in self.layout()):
            raise ValueError("plant elements collapse to zero length; raise duration for nested Contains")
        if self.straddle:
            cut = self.cut
            if not 1 <= cut <= len(rels) or rels[cut - 1] is not RelationKind.FOLLOWS:
                raise ValueError("a straddling plant must be cut at a Follows gap")

    @property
    def length(self) -> int:
        return len(self.relations) + 1

    @property
    def cut(self) -> int:
        return self.straddle_after if self.straddle_after is not None else (self.length + 1) // 2

    def layout(self) -> list[tuple[int, int]]:
        """Element intervals in samples relative to the chain start (half-open)."""
        d = self.duration
        out = [(0, d)]
        for r in self.relations:
            s, e = out[-1]
            if r is RelationKind.FOLLOWS:
                out.append((e + 1, e + 1 + d))
            elif r is RelationKind.CONTAINS:
                out.append((s + 1, e - 1))
            else:
                ov = max(1, (e - s) // 2)
                out.append((e - ov, e - ov + d))
        return out

    def span(self) -> int:
        lay = self.layout()
        return max(e for _, e in lay) - lay[0][0]


@dataclass(frozen=True)
class GenSpec:
    """Generator parameters. Times are in samples; ``period`` converts to ticks."""

    seed: int = 0
    n_series: int = 10
    n_timestamps: int = 1000
    alphabet_size: int = 3
    run_length: float = 5.0
    window: int = 10
    period: int = 1
    t0: int = 0
    blocks: tuple[BlockSpec, ...] = ()
    plants: tuple[PlantSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "plants", tuple(self.plants))
        if self.n_series < 0 or self.n_timestamps < 1:
            raise ValueError("need n_series >= 0 and n_timestamps >= 1")
        if self.alphabet_size < 1:
            raise ValueError("alphabet_size must be positive")
        if self.run_length < 1:
            raise ValueError("run_length must be at least 1")
        if self.window < 1 or self.period < 1:
            raise ValueError("window and period must be positive")
        if sum(b.size for b in self.blocks) > self.n_series:
            raise ValueError("correlated blocks need more series than n_series")
        for p in self.plants:
            if p.span() > self.window:
                raise ValueError(f"plant spans {p.span()} samples, longer than the window ({self.window})")

    def symbols(self) -> tuple[str, ...]:
        return tuple(f"v{i}" for i in range(self.alphabet_size))


def _run_stream(rng: np.random.Generator, n: int, k: int, mean_run: float) -> np.ndarray:
    if k == 1:
        return np.zeros(n, dtype=np.int64)
    p = 1.0 / mean_run
    runs = rng.geometric(p, size=max(4, int(2 * n / mean_run) + 4))
    while runs.sum() < n:
        runs = np.concatenate((runs, rng.geometric(p, size=runs.size)))
    steps = rng.integers(1, k, size=runs.size)
    steps[0] = rng.integers(0, k)
    values = np.cumsum(steps) % k
    return np.repeat(values, runs)[:n]


def _flip(rng: np.random.Generator, codes: np.ndarray, k: int, rate: float) -> np.ndarray:
    if rate == 0.0 or k == 1:
        return codes.copy()
    out = codes.copy()
    hit = rng.random(codes.size) < rate
    out[hit] = (out[hit] + rng.integers(1, k, size=int(hit.sum()))) % k
    return out


def generate(spec: GenSpec) -> tuple[SymbolicDatabase, dict]:
    """Build the database and manifest described by ``spec``; pure given the seed."""
    root = np.random.SeedSequence(spec.seed)
    n, k = spec.n_timestamps, spec.alphabet_size
    syms = np.asarray(spec.symbols(), dtype=object)
    ts = spec.t0 + spec.period * np.arange(n, dtype=np.int64)
    n_blocks = len(spec.blocks)
    children = root.spawn(spec.n_series + n_blocks + len(spec.plants))
    series: list[SymbolicSeries] = []
    manifest: dict = {"spec": _spec_dict(spec), "blocks": [], "plants": []}

    idx = 0
    for b, block in enumerate(spec.blocks):
        latent_rng = np.random.default_rng(children[spec.n_series + b])
        latent = _run_stream(latent_rng, n, k, spec.run_length)
        members = []
        for _ in range(block.size):
            rng = np.random.default_rng(children[idx])
            name = f"s{idx:03d}"
            series.append(SymbolicSeries(name, ts, syms[_flip(rng, latent, k, block.flip_rate)], spec.symbols(), spec.period))
            members.append(name)
            idx += 1
        manifest["blocks"].append({"series": members, "flip_rate": block.flip_rate})
    while idx < spec.n_series:
        rng = np.random.default_rng(children[idx])
        series.append(SymbolicSeries(f"s{idx:03d}", ts, syms[_run_stream(rng, n, k, spec.run_length)], spec.symbols(), spec.period))
        idx += 1

    n_windows = n // spec.window
    for pi, plant in enumerate(spec.plants):
        rng = np.random.default_rng(children[spec.n_series + n_blocks + pi])
        names = [f"p{pi}_{j}" for j in range(plant.length)]
        on = np.zeros((plant.length, n), dtype=bool)
        layout = plant.layout()
        span = plant.span()
        occurrences = []
        usable = n_windows - 1 if plant.straddle else n_windows
        chosen = np.flatnonzero(rng.random(max(usable, 0)) < plant.rate)
        for w in chosen:
            if plant.straddle:
                boundary = (int(w) + 1) * spec.window
                gap_lo = layout[plant.cut - 1][1]
                gap_hi = layout[plant.cut][0]
                # boundary must fall strictly after the last sample before the gap
                offset = boundary - int(rng.integers(gap_lo, gap_hi + 1))
                if offset < 0 or offset + span > n:
                    continue
            else:
                start = int(w) * spec.window
                offset = start + int(rng.integers(0, spec.window - span + 1))
            insts = []
            for j, (a, b) in enumerate(layout):
                on[j, offset + a: offset + b] = True
                insts.append(EventInstance.of(EventType(names[j], "on"), int(ts[0] + (offset + a) * spec.period),
                                              int(ts[0] + (offset + b) * spec.period)))
            occurrences.append({"window": int(w), "start": insts[0].start,
                                "end": max(i.end for i in insts)})
        for j, name in enumerate(names):
            series.append(SymbolicSeries(name, ts, np.where(on[j], "on", "off").astype(object), ("off", "on"), spec.period))
        pattern = _plant_pattern(plant, names, spec.period)
        manifest["plants"].append({
            "series": names,
            "pattern": str(pattern),
            "events": [[e.series, e.symbol] for e in pattern.events],
            "relations": [str(r) for r in pattern.relations],
            "straddle": plant.straddle,
            "occurrences": occurrences,
        })
    return SymbolicDatabase(tuple(series)), manifest


def _plant_pattern(plant: PlantSpec, names: list[str], period: int) -> TemporalPattern:
    insts = [EventInstance.of(EventType(nm, "on"), a * period, b * period) for nm, (a, b) in zip(names, plant.layout())]
    rels = tuple(classify_relation(insts[i], insts[j], 0, 1) for i, j in pair_slots(len(insts)))
    return TemporalPattern(tuple(i.event for i in insts), rels)


def plant_pattern(spec: GenSpec, index: int) -> TemporalPattern:
    """The pattern realised by plant ``index`` (relations evaluated with no tolerance)."""
    plant = spec.plants[index]
    return _plant_pattern(plant, [f"p{index}_{j}" for j in range(plant.length)], spec.period)


def _spec_dict(spec: GenSpec) -> dict:
    d = asdict(spec)
    d["plants"] = [{**asdict(p), "relations": [str(r) for r in p.relations]} for p in spec.plants]
    return d


def write_csv(db: SymbolicDatabase, path) -> None:
    """Wide CSV: ``timestamp`` then one column per series."""
    cols = [s.symbols for s in db.series]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(["timestamp"] + db.series_ids) + "\n")
        for r, t in enumerate(db.timestamps):
            fh.write(",".join([str(int(t))] + [str(c[r]) for c in cols]) + "\n")


def _parse_blocks(text: str) -> tuple[BlockSpec, ...]:
    # "size@flip*count, ..."
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        count = 1
        if "*" in part:
            part, c = part.split("*")
            count = int(c)
        size, _, flip = part.partition("@")
        out.extend([BlockSpec(int(size), float(flip or 0.0))] * count)
    return tuple(out)


def _parse_plant(text: str) -> PlantSpec:
    # "follows,follows; duration=2; rate=1; straddle=true"
    parts = [p.strip() for p in text.split(";")]
    rels = tuple(RelationKind.parse(r) for r in parts[0].split(",") if r.strip())
    kw = {}
    for p in parts[1:]:
        if not p:
            continue
        key, _, val = p.partition("=")
        key = key.strip()
        if key == "duration":
            kw[key] = int(val)
        elif key == "rate":
            kw[key] = float(val)
        elif key == "straddle":
            kw[key] = val.strip().lower() in ("1", "true", "yes")
        elif key == "straddle_after":
            kw[key] = int(val)
        else:
            raise ValueError(f"unknown plant option {key!r}")
    return PlantSpec(rels, **kw)


_INT_KEYS = {"seed", "n_series", "n_timestamps", "alphabet_size", "window", "period", "t0"}


def parse_gen_spec(items: dict[str, str]) -> GenSpec:
    """Build a :class:`GenSpec` from flat ``key = value`` pairs.

    ``blocks = 5@0.002*30`` declares 30 blocks of 5 series with flip rate
    0.002; each ``plant``-prefixed key declares one plant, e.g.
    ``plant.a = follows,follows,follows; duration=2; rate=1; straddle=true``.
    """
    kw: dict = {}
    plants = []
    for key, val in items.items():
        if key in _INT_KEYS:
            kw[key] = int(val)
        elif key == "run_length":
            kw[key] = float(val)
        elif key == "blocks":
            kw[key] = _parse_blocks(val)
        elif key == "plant" or key.startswith("plant."):
            plants.append((key, _parse_plant(val)))
        else:
            raise ValueError(f"unknown generator key {key!r}")
    kw["plants"] = tuple(p for _, p in sorted(plants, key=lambda kv: kv[0]))
    return GenSpec(**kw)


def manifest_json(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True)
