"""Hierarchical lookup hash structures for the level-wise miner.

Level 1 maps events to the sequences containing them and to their
instances there. Level k maps event groups to the patterns found over
them, patterns to supporting sequences, and (pattern, sequence) to one
witness. Sequence sets are kept both as ascending id lists and as integer
bitmasks so intersections are cheap.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import EventInstance, EventType, SequenceDatabase, TemporalPattern

__all__ = ["HLH1", "HLHk", "GroupEntry", "IntegrityError", "build_hlh1", "intersect_sequences",
           "insert_pattern", "mask_of", "ids_of"]


class IntegrityError(RuntimeError):
    """Conflicting payloads or broken cross-table invariants."""


def mask_of(ids: Iterable[int]) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def ids_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass
class HLH1:
    """Single-event level: event -> sequence ids, (event, sequence id) -> instances."""

    n_sequences: int
    EH: dict[EventType, list[int]] = field(default_factory=dict)
    SH: dict[tuple[EventType, int], tuple[EventInstance, ...]] = field(default_factory=dict)
    masks: dict[EventType, int] = field(default_factory=dict)

    def count(self, event: EventType) -> int:
        return len(self.EH[event])

    def events(self) -> list[EventType]:
        return sorted(self.EH)

    def audit(self):
        for ev, ids in self.EH.items():
            if ids != sorted(set(ids)):
                raise IntegrityError(f"{ev}: sequence list not strictly ascending")
            if mask_of(ids) != self.masks[ev]:
                raise IntegrityError(f"{ev}: mask disagrees with sequence list")
        keys = {(ev, sid) for ev, ids in self.EH.items() for sid in ids}
        if keys != set(self.SH):
            raise IntegrityError("SH keys differ from EH entries")


@dataclass
class GroupEntry:
    sequences: list[int]
    patterns: list[TemporalPattern] = field(default_factory=list)


@dataclass
class HLHk:
    """Pattern level k: group -> (sequences, patterns), pattern -> sequences, (pattern, sid) -> witness."""

    k: int
    EH: dict[tuple[EventType, ...], GroupEntry] = field(default_factory=dict)
    PH: dict[TemporalPattern, list[int]] = field(default_factory=dict)
    SH: dict[tuple[TemporalPattern, int], tuple[EventInstance, ...]] = field(default_factory=dict)
    masks: dict[TemporalPattern, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.PH)

    def patterns(self) -> list[TemporalPattern]:
        return sorted(self.PH)

    def events(self) -> set[EventType]:
        out: set[EventType] = set()
        for p in self.PH:
            out.update(p.events)
        return out

    def audit(self):
        listed = [p for entry in self.EH.values() for p in entry.patterns]
        if len(listed) != len(set(listed)) or set(listed) != set(self.PH):
            raise IntegrityError("PH keys differ from the pattern lists in EH")
        for group, entry in self.EH.items():
            for p in entry.patterns:
                if p.group() != group or p.k != self.k:
                    raise IntegrityError(f"{p} filed under the wrong group")
                if not set(self.PH[p]) <= set(entry.sequences):
                    raise IntegrityError(f"{p} supported outside its group's sequences")
        for p, ids in self.PH.items():
            if ids != sorted(set(ids)) or mask_of(ids) != self.masks[p]:
                raise IntegrityError(f"{p}: inconsistent sequence list")
            for sid in ids:
                if (p, sid) not in self.SH:
                    raise IntegrityError(f"{p}: missing witness for sequence {sid}")
        if len(self.SH) != sum(len(ids) for ids in self.PH.values()):
            raise IntegrityError("SH holds witnesses for unknown (pattern, sequence) keys")

    def to_json(self) -> str:
        """Debug dump of the three tables."""
        def ev(e):
            return str(e)
        data = {
            "k": self.k,
            "EH": {"|".join(map(ev, g)): {"sequences": e.sequences, "patterns": [str(p) for p in e.patterns]}
                   for g, e in sorted(self.EH.items())},
            "PH": {str(p): ids for p, ids in sorted(self.PH.items())},
            "SH": {f"{p}@{sid}": [str(i) for i in w] for (p, sid), w in sorted(self.SH.items(), key=lambda kv: (kv[0][0], kv[0][1]))},
        }
        return json.dumps(data, indent=2)


def build_hlh1(db: SequenceDatabase, min_count: int) -> HLH1:
    """Index every event occurring in at least ``min_count`` sequences.

    ``min_count`` is an absolute sequence count; see
    :meth:`MiningConfig.min_count` for the conversion from relative support.
    """
    if len(db) == 0:
        raise ValueError("sequence database is empty")
    per_event: dict[EventType, list[int]] = {}
    for sid, seq in enumerate(db):
        for ev in seq.events():
            per_event.setdefault(ev, []).append(sid)
    h = HLH1(len(db))
    for ev in sorted(per_event):
        ids = per_event[ev]
        if len(ids) < min_count:
            continue
        h.EH[ev] = ids
        h.masks[ev] = mask_of(ids)
        for sid in ids:
            seq = db.sequences[sid]
            h.SH[(ev, sid)] = tuple(seq.instances[p] for p in seq.positions(ev))
    return h


def intersect_sequences(h, keys) -> tuple[list[int], bool]:
    """Ascending ids of sequences shared by all ``keys`` (events or patterns).

    Returns ``(ids, complete)``; ``complete`` is False when a key is not
    indexed in ``h``, in which case ``ids`` is empty.
    """
    keys = list(keys)
    if not keys:
        return [], False
    mask = -1
    for key in keys:
        m = h.masks.get(key)
        if m is None:
            return [], False
        mask &= m
    return ids_of(mask), True


def insert_pattern(h: HLHk, group: tuple[EventType, ...], pattern: TemporalPattern,
                   sequences: list[int], witnesses: dict[int, tuple[EventInstance, ...]],
                   group_sequences: Optional[list[int]] = None):
    """Store ``pattern`` with its supporting sequences and one witness per sequence."""
    group = tuple(group)
    if pattern.k != h.k:
        raise IntegrityError(f"level {h.k} cannot store a {pattern.k}-event pattern")
    if pattern.group() != group:
        raise IntegrityError(f"{pattern} does not belong to group {group}")
    ids = sorted(sequences)
    if set(witnesses) != set(ids):
        raise IntegrityError("need exactly one witness per supporting sequence")
    if pattern in h.PH:
        same = h.PH[pattern] == ids and all(h.SH[(pattern, s)] == witnesses[s] for s in ids)
        if not same:
            raise IntegrityError(f"{pattern} already stored with a different payload")
        return
    entry = h.EH.get(group)
    if entry is None:
        entry = h.EH[group] = GroupEntry(sorted(group_sequences) if group_sequences is not None else list(ids))
    elif group_sequences is None:
        entry.sequences = sorted(set(entry.sequences) | set(ids))
    entry.patterns.append(pattern)
    h.PH[pattern] = ids
    h.masks[pattern] = mask_of(ids)
    for sid in ids:
        h.SH[(pattern, sid)] = tuple(witnesses[sid])
