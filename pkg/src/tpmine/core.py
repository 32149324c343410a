"""Domain types and the buffered interval-relation classifier.

All time quantities are integer tick counts at one base resolution per
dataset (seconds, minutes, frames, ...). Every other module builds on the
types defined here.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

__all__ = [
    "Interval",
    "EventType",
    "EventInstance",
    "TemporalSequence",
    "SequenceDatabase",
    "RelationKind",
    "RelationTriple",
    "TemporalPattern",
    "Mode",
    "Pruning",
    "MiningConfig",
    "classify_relation",
    "sequence_supports",
    "iter_witnesses",
    "pair_slots",
]


@dataclass(frozen=True, slots=True)
class Interval:
    start: int
    end: int

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"interval must satisfy start < end, got [{self.start}, {self.end}]")

    @property
    def duration(self) -> int:
        return self.end - self.start


@dataclass(frozen=True, slots=True, order=True)
class EventType:
    """A (series, symbol) pair, e.g. ``EventType("S", "On")`` for *SOn*."""

    series: str
    symbol: str

    def __str__(self):
        return f"{self.series}{self.symbol}"


@dataclass(frozen=True, slots=True)
class EventInstance:
    event: EventType
    interval: Interval

    @classmethod
    def of(cls, event: EventType, start: int, end: int) -> "EventInstance":
        return cls(event, Interval(start, end))

    @property
    def start(self) -> int:
        return self.interval.start

    @property
    def end(self) -> int:
        return self.interval.end

    def sort_key(self):
        # equal starts: the longer instance first, so a container precedes
        # what it contains and Contains is expressible for shared starts
        return (self.interval.start, -self.interval.end, self.event)

    def __str__(self):
        return f"({self.event},[{self.start},{self.end}])"


@dataclass(frozen=True)
class TemporalSequence:
    sequence_id: int
    instances: tuple[EventInstance, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.instances, key=EventInstance.sort_key))
        object.__setattr__(self, "instances", ordered)
        index: dict[EventType, list[int]] = {}
        for pos, e in enumerate(ordered):
            index.setdefault(e.event, []).append(pos)
        object.__setattr__(self, "_index", {ev: tuple(v) for ev, v in index.items()})

    def positions(self, event: EventType) -> tuple[int, ...]:
        """Ascending positions of ``event``'s instances."""
        return self._index.get(event, ())

    def __len__(self):
        return len(self.instances)

    def events(self) -> set[EventType]:
        return set(self._index)


@dataclass(frozen=True)
class SequenceDatabase:
    sequences: tuple[TemporalSequence, ...]
    window_length: int = 0
    overlap: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sequences", tuple(self.sequences))
        if self.overlap < 0:
            raise ValueError("overlap must be non-negative")

    def __len__(self):
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)

    def __getitem__(self, index: int) -> TemporalSequence:
        return self.sequences[index]

    def events(self) -> set[EventType]:
        out: set[EventType] = set()
        for s in self.sequences:
            out |= s.events()
        return out


class RelationKind(enum.IntEnum):
    FOLLOWS = 0
    CONTAINS = 1
    OVERLAPS = 2

    def __str__(self):
        return self.name.capitalize()

    @classmethod
    def parse(cls, text: str) -> "RelationKind":
        return cls[text.strip().upper()]


@dataclass(frozen=True, slots=True, order=True)
class RelationTriple:
    relation: RelationKind
    left_slot: int
    right_slot: int

    def __post_init__(self):
        if not self.left_slot < self.right_slot:
            raise ValueError("left_slot must precede right_slot")


def pair_slots(k: int) -> list[tuple[int, int]]:
    """Slot pairs of a k-event pattern in column order.

    Column order ``(0,1), (0,2), (1,2), (0,3), ...`` makes the relations of
    a prefix pattern a prefix of the relations of any extension.
    """
    return [(i, j) for j in range(1, k) for i in range(j)]


@dataclass(frozen=True, order=True)
class TemporalPattern:
    """k chronologically ordered event slots plus one relation per slot pair.

    ``relations`` is aligned with :func:`pair_slots`. Repeated event types
    across slots are allowed.
    """

    events: tuple[EventType, ...]
    relations: tuple[RelationKind, ...]

    def __post_init__(self):
        k = len(self.events)
        if k < 1:
            raise ValueError("a pattern needs at least one event")
        if len(self.relations) != k * (k - 1) // 2:
            raise ValueError(f"{k}-event pattern needs {k * (k - 1) // 2} relations, got {len(self.relations)}")

    @classmethod
    def from_triples(cls, events: Sequence[EventType], triples: Iterable[RelationTriple]) -> "TemporalPattern":
        lookup = {(t.left_slot, t.right_slot): t.relation for t in triples}
        k = len(events)
        try:
            rels = tuple(RelationKind(lookup[p]) for p in pair_slots(k))
        except KeyError as exc:
            raise ValueError(f"missing relation for slot pair {exc.args[0]}") from None
        if len(lookup) != k * (k - 1) // 2:
            raise ValueError("unexpected extra triples")
        return cls(tuple(events), rels)

    @property
    def k(self) -> int:
        return len(self.events)

    @property
    def triples(self) -> tuple[RelationTriple, ...]:
        return tuple(RelationTriple(r, i, j) for (i, j), r in zip(pair_slots(self.k), self.relations))

    def relation(self, i: int, j: int) -> RelationKind:
        return self.relations[j * (j - 1) // 2 + i]

    def prefix(self) -> "TemporalPattern":
        k = self.k - 1
        return TemporalPattern(self.events[:k], self.relations[: k * (k - 1) // 2])

    def sub_pattern(self, slots: Sequence[int]) -> "TemporalPattern":
        slots = sorted(slots)
        rels = tuple(self.relation(slots[a], slots[b]) for a, b in pair_slots(len(slots)))
        return TemporalPattern(tuple(self.events[s] for s in slots), rels)

    def group(self) -> tuple[EventType, ...]:
        return tuple(sorted(self.events))

    def __str__(self):
        if self.k == 1:
            return str(self.events[0])
        parts = [f"{t.relation}({self.events[t.left_slot]},{self.events[t.right_slot]})" for t in self.triples]
        return "{" + ", ".join(parts) + "}"


class Mode(enum.Enum):
    FREQUENT = "frequent"
    RARE = "rare"


class Pruning(enum.Enum):
    NONE = "none"
    APRIORI = "apriori"
    TRANSITIVITY = "transitivity"
    ALL = "all"

    @property
    def apriori(self) -> bool:
        return self in (Pruning.APRIORI, Pruning.ALL)

    @property
    def transitivity(self) -> bool:
        return self in (Pruning.TRANSITIVITY, Pruning.ALL)


def _as_fraction(x: float) -> Fraction:
    return Fraction(x).limit_denominator(10**9)


@dataclass(frozen=True)
class MiningConfig:
    """Thresholds and relation parameters for one mining run.

    Supports are relative (fractions of ``|D_SEQ|``); they are converted to
    sequence counts by ceiling (``sigma_min``) and floor (``sigma_max``).
    """

    sigma_min: float = 0.5
    delta: float = 0.5
    sigma_max: Optional[float] = None
    epsilon: int = 0
    d_o: int = 1
    t_max: int = 10**18
    mode: Mode = Mode.FREQUENT
    pruning: Pruning = Pruning.ALL
    max_pattern_len: int = 5

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "pruning", Pruning(self.pruning))
        if self.mode is Mode.FREQUENT:
            object.__setattr__(self, "sigma_max", None)
        if not 0.0 <= self.sigma_min <= 1.0:
            raise ValueError("sigma_min must lie in [0, 1]")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")
        if self.sigma_max is not None:
            if not 0.0 < self.sigma_max <= 1.0:
                raise ValueError("sigma_max must lie in (0, 1]")
            if self.sigma_min > self.sigma_max:
                raise ValueError("sigma_min must not exceed sigma_max")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if not self.epsilon < self.d_o:
            raise ValueError("epsilon must be smaller than d_o")
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.max_pattern_len < 1:
            raise ValueError("max_pattern_len must be positive")

    def min_count(self, n_sequences: int) -> int:
        # zero-support patterns are never reported
        return max(1, math.ceil(_as_fraction(self.sigma_min) * n_sequences))

    def max_count(self, n_sequences: int) -> Optional[int]:
        if self.sigma_max is None:
            return None
        return math.floor(_as_fraction(self.sigma_max) * n_sequences)

    def confident(self, support: int, max_event_support: int) -> bool:
        """``support / max_event_support >= delta`` in exact arithmetic."""
        d = _as_fraction(self.delta)
        return support * d.denominator >= d.numerator * max_event_support


def _relation(si: int, ei: int, sj: int, ej: int, eps: int, d_o: int) -> Optional[RelationKind]:
    # precedence Contains -> Overlaps -> Follows keeps the result unique
    if si <= sj and ej <= ei + eps:
        return RelationKind.CONTAINS
    if si < sj and ej > ei + eps and ei - sj >= d_o - eps:
        return RelationKind.OVERLAPS
    if sj >= ei - eps:
        return RelationKind.FOLLOWS
    return None


def classify_relation(e_i: EventInstance, e_j: EventInstance, epsilon: int, d_o: int) -> Optional[RelationKind]:
    """Relation between two instances, ``e_i`` preceding ``e_j`` in sequence order.

    Returns ``None`` when none of Follows, Contains, Overlaps holds.
    """
    return _relation(e_i.start, e_i.end, e_j.start, e_j.end, epsilon, d_o)


def iter_witnesses(seq: TemporalSequence, p: TemporalPattern, cfg: MiningConfig, tally: Optional[list] = None):
    """Yield every consistent witness of ``p`` in ``seq`` as a tuple of instance positions.

    Slots take instances strictly increasing in sequence order and the
    whole witness spans at most ``cfg.t_max``. When ``tally`` is given,
    ``tally[0]`` is incremented once per relation evaluation.
    """
    k = p.k
    inst = seq.instances
    cands = []
    for ev in p.events:
        pos = seq.positions(ev)
        if not pos:
            return
        cands.append(pos)
    eps, d_o, t_max, rels = cfg.epsilon, cfg.d_o, cfg.t_max, p.relations
    chosen: list[int] = []
    checks = 0

    def search(slot: int, lo: int, first_start: int, max_end: int):
        nonlocal checks
        if slot == k:
            yield tuple(chosen)
            return
        base = slot * (slot - 1) // 2
        for pos in cands[slot]:
            if pos <= lo:
                continue
            e = inst[pos]
            if e.interval.start - first_start > t_max:
                break
            new_end = max(max_end, e.interval.end)
            if new_end - first_start > t_max:
                continue
            ok = True
            for i in range(slot):
                prev = inst[chosen[i]].interval
                checks += 1
                if _relation(prev.start, prev.end, e.interval.start, e.interval.end, eps, d_o) != rels[base + i]:
                    ok = False
                    break
            if not ok:
                continue
            chosen.append(pos)
            yield from search(slot + 1, pos, first_start, new_end)
            chosen.pop()

    try:
        for pos in cands[0]:
            iv = inst[pos].interval
            if iv.end - iv.start > t_max:
                continue
            chosen.append(pos)
            yield from search(1, pos, iv.start, iv.end)
            chosen.pop()
    finally:
        if tally is not None:
            tally[0] += checks


def sequence_supports(seq: TemporalSequence, p: TemporalPattern, cfg: MiningConfig, tally: Optional[list] = None):
    """Check whether ``seq`` supports ``p`` through one consistent witness.

    Returns ``(True, witness)`` with one instance per slot, or
    ``(False, None)``.
    """
    if p.k < 2:
        raise ValueError("sequence_supports needs a pattern with at least 2 events")
    for positions in iter_witnesses(seq, p, cfg, tally):
        return True, tuple(seq.instances[i] for i in positions)
    return False, None
