"""Naive reference miner used as ground truth in tests.

No indexes, no pruning: every chronologically ordered tuple of instances
in every sequence proposes the pattern it realises, and every proposed
pattern is then counted against every sequence. A pattern with support
of at least one sequence necessarily has a realising tuple somewhere, so
this covers the full candidate space that can pass any threshold.
"""
from __future__ import annotations

from itertools import combinations

from .core import MiningConfig, Mode, SequenceDatabase, TemporalPattern, classify_relation, pair_slots, sequence_supports
from .miner import PatternResult

__all__ = ["brute_force_mine", "OracleGuardError"]

MAX_EVENTS = 12
MAX_SEQUENCES = 50
MAX_LENGTH = 4


class OracleGuardError(ValueError):
    """Instance too large for exhaustive enumeration."""


def _proposals(db: SequenceDatabase, cfg: MiningConfig, max_len: int) -> set[TemporalPattern]:
    found = set()
    for seq in db:
        inst = seq.instances
        for k in range(2, max_len + 1):
            for combo in combinations(range(len(inst)), k):
                chosen = [inst[p] for p in combo]
                span = max(e.end for e in chosen) - chosen[0].start
                if span > cfg.t_max:
                    continue
                rels = []
                for i, j in pair_slots(k):
                    r = classify_relation(chosen[i], chosen[j], cfg.epsilon, cfg.d_o)
                    if r is None:
                        break
                    rels.append(r)
                else:
                    found.add(TemporalPattern(tuple(e.event for e in chosen), tuple(rels)))
    return found


def brute_force_mine(db: SequenceDatabase, cfg: MiningConfig) -> list[PatternResult]:
    """All patterns of length 1..``cfg.max_pattern_len`` meeting the thresholds.

    Single events are filtered by minimum support only; longer patterns by
    minimum support, confidence and, in rare mode, maximum support.
    """
    n = len(db)
    if n == 0:
        return []
    events = sorted(db.events())
    if len(events) > MAX_EVENTS or n > MAX_SEQUENCES or cfg.max_pattern_len > MAX_LENGTH:
        raise OracleGuardError(
            f"oracle limited to {MAX_EVENTS} events, {MAX_SEQUENCES} sequences, length {MAX_LENGTH}")
    min_count = cfg.min_count(n)
    max_count = cfg.max_count(n) if cfg.mode is Mode.RARE else None
    event_ids = {ev: tuple(sid for sid, s in enumerate(db) if ev in s.events()) for ev in events}

    out = []
    for ev in events:
        ids = event_ids[ev]
        if len(ids) >= min_count:
            out.append(PatternResult(TemporalPattern((ev,), ()), len(ids), n, len(ids), ids))
    for p in sorted(_proposals(db, cfg, cfg.max_pattern_len)):
        ids = tuple(sid for sid, s in enumerate(db) if sequence_supports(s, p, cfg)[0])
        cnt = len(ids)
        max_c = max(len(event_ids[e]) for e in p.events)
        if cnt < min_count or not cfg.confident(cnt, max_c):
            continue
        if max_count is not None and cnt > max_count:
            continue
        out.append(PatternResult(p, cnt, n, max_c, ids))
    return out
