"""Exact level-wise temporal pattern mining and its MI-screened approximation.

Level 1 indexes frequent events. Level 2 pairs frequent events (self
pairs included) and classifies every chronologically ordered instance
pair. Level k >= 3 extends each stored (k-1)-pattern with one frequent
event placed after the prefix's last slot, so every pattern is produced
exactly once from its unique prefix.

Two pruning families can be switched independently:

* Apriori: the candidate's sequence set (prefix sequences intersected
  with the new event's) must still meet the support and confidence
  thresholds.
* Transitivity: the new event must occur in some (k-1)-pattern and follow
  the prefix's last event in a stored 2-pattern; relations to the new
  slot are then assembled from stored 2-patterns, right to left, with an
  early exit as soon as the intersected sequence set falls short.

Either way every candidate is finally verified against the sequences with
a single consistent witness, so pruning never changes the output.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from .bounds import MuThresholds, combine_thresholds, select_mu
from .core import (
    EventInstance,
    EventType,
    MiningConfig,
    Mode,
    SequenceDatabase,
    TemporalPattern,
    _relation,
    iter_witnesses,
    sequence_supports,
)
from .hlh import HLH1, HLHk, build_hlh1, ids_of, insert_pattern
from .measures import stats_from_joint
from .transform import SymbolicDatabase, build_sequence_db

__all__ = [
    "PatternResult",
    "Counters",
    "MiningReport",
    "mine",
    "mine_pairs",
    "mine_k",
    "mine_approximate",
    "series_pair_thresholds",
    "batch_thresholds",
    "batch_nmi",
    "accuracy",
]


@dataclass(frozen=True)
class PatternResult:
    pattern: TemporalPattern
    count: int
    n_sequences: int
    max_event_count: int
    sequences: tuple[int, ...]
    witnesses: tuple[tuple[EventInstance, ...], ...] = ()

    @property
    def support(self) -> float:
        return self.count / self.n_sequences

    @property
    def confidence(self) -> float:
        return self.count / self.max_event_count

    def exact_confidence(self) -> Fraction:
        return Fraction(self.count, self.max_event_count)

    def key(self):
        return (self.pattern, self.count)

    def to_dict(self) -> dict:
        p = self.pattern
        return {
            "events": [[e.series, e.symbol] for e in p.events],
            "triples": [[str(t.relation), t.left_slot, t.right_slot] for t in p.triples],
            "text": str(p),
            "count": self.count,
            "support": self.support,
            "confidence": self.confidence,
            "sequences": list(self.sequences),
            "witnesses": [[[str(i.event), i.start, i.end] for i in w] for w in self.witnesses],
        }


@dataclass
class Counters:
    """Work counters; ``generated == candidates + pruned_apriori + pruned_transitivity + pruned_mi``."""

    generated: int = 0
    candidates: int = 0
    pruned_apriori: int = 0
    pruned_transitivity: int = 0
    pruned_mi: int = 0
    relation_checks: int = 0

    def consistent(self) -> bool:
        return self.generated == self.candidates + self.pruned_apriori + self.pruned_transitivity + self.pruned_mi

    def add(self, other: "Counters"):
        for k, v in asdict(other).items():
            setattr(self, k, getattr(self, k) + v)


@dataclass
class MiningReport:
    config: MiningConfig
    n_sequences: int
    levels: dict[int, list[PatternResult]] = field(default_factory=dict)
    counters: Counters = field(default_factory=Counters)
    level_counters: dict[int, Counters] = field(default_factory=dict)
    hlh: dict[int, object] = field(default_factory=dict)
    prune_log: Optional[dict] = None
    timings: dict[str, float] = field(default_factory=dict)

    def results(self, min_len: int = 1) -> list[PatternResult]:
        return [r for k in sorted(self.levels) if k >= min_len for r in self.levels[k]]

    def pattern_keys(self, min_len: int = 1) -> set:
        return {r.key() for r in self.results(min_len)}

    def patterns(self, min_len: int = 1) -> set[TemporalPattern]:
        return {r.pattern for r in self.results(min_len)}

    def single_events(self) -> list[EventType]:
        return [r.pattern.events[0] for r in self.levels.get(1, [])]

    def to_dict(self, include_witnesses: bool = True) -> dict:
        cfg = asdict(self.config)
        cfg["mode"] = self.config.mode.value
        cfg["pruning"] = self.config.pruning.value
        out = {
            "config": cfg,
            "n_sequences": self.n_sequences,
            "levels": {},
            "counters": asdict(self.counters),
            "level_counters": {str(k): asdict(c) for k, c in sorted(self.level_counters.items())},
            "timings": self.timings,
        }
        for k, rs in sorted(self.levels.items()):
            rows = [r.to_dict() for r in rs]
            if not include_witnesses:
                for row in rows:
                    row.pop("witnesses")
            out["levels"][str(k)] = rows
        if self.prune_log is not None:
            out["prune_log"] = self.prune_log
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(**kw), indent=2, sort_keys=True)

    def table(self) -> str:
        """Plain-text table: pattern, support %, confidence %."""
        lines = [f"{'k':>2}  {'support%':>8}  {'conf%':>6}  pattern"]
        for r in self.results():
            lines.append(f"{r.pattern.k:>2}  {100 * r.support:8.2f}  {100 * r.confidence:6.2f}  {r.pattern}")
        return "\n".join(lines) + "\n"


def _popcount(m: int) -> int:
    return m.bit_count()


class _Engine:
    """Shared state for one mining run over a fixed sequence database."""

    def __init__(self, db: SequenceDatabase, cfg: MiningConfig,
                 pair_allowed: Optional[Callable[[EventType, EventType], bool]] = None):
        if len(db) == 0:
            raise ValueError("sequence database is empty")
        self.db = db
        self.cfg = cfg
        self.n = len(db)
        self.min_count = cfg.min_count(self.n)
        self.max_count = cfg.max_count(self.n) if cfg.mode is Mode.RARE else None
        self.pair_allowed = pair_allowed
        self.tally = [0]

    def _confident(self, count: int, max_event_count: int) -> bool:
        return count >= self.min_count and self.cfg.confident(count, max_event_count)

    def _emits(self, count: int) -> bool:
        return self.max_count is None or count <= self.max_count

    def level1(self, allowed_events=None) -> HLH1:
        h1 = build_hlh1(self.db, self.min_count)
        if allowed_events is not None:
            for ev in [e for e in h1.EH if e not in allowed_events]:
                for sid in h1.EH.pop(ev):
                    del h1.SH[(ev, sid)]
                del h1.masks[ev]
        self.h1 = h1
        self.counts = {ev: len(ids) for ev, ids in h1.EH.items()}
        return h1

    def _max_count_of(self, events) -> int:
        return max(self.counts[e] for e in events)

    def mine_pairs(self, c: Counters) -> tuple[HLHk, list[PatternResult]]:
        cfg, db, h1 = self.cfg, self.db, self.h1
        eps, d_o, t_max = cfg.epsilon, cfg.d_o, cfg.t_max
        h2 = HLHk(2)
        emitted = []
        events = h1.events()
        for ia, a in enumerate(events):
            for b in events[ia:]:
                c.generated += 1
                if self.pair_allowed is not None and not self.pair_allowed(a, b):
                    c.pruned_mi += 1
                    continue
                mask = h1.masks[a] & h1.masks[b]
                max_c = max(self.counts[a], self.counts[b])
                if cfg.pruning.apriori and not self._confident(_popcount(mask), max_c):
                    c.pruned_apriori += 1
                    continue
                c.candidates += 1
                found: dict[tuple, dict[int, tuple]] = {}
                checks = 0
                for sid in ids_of(mask):
                    seq = db.sequences[sid]
                    inst = seq.instances
                    pa, pb = seq.positions(a), seq.positions(b)
                    if a == b:
                        pairs = combinations(pa, 2)
                    else:
                        pairs = sorted((p, q) if p < q else (q, p) for p in pa for q in pb)
                    for p, q in pairs:
                        ei, ej = inst[p].interval, inst[q].interval
                        if max(ei.end, ej.end) - ei.start > t_max:
                            continue
                        checks += 1
                        r = _relation(ei.start, ei.end, ej.start, ej.end, eps, d_o)
                        if r is None:
                            continue
                        per_seq = found.setdefault((inst[p].event, inst[q].event, r), {})
                        if sid not in per_seq:
                            per_seq[sid] = (inst[p], inst[q])
                c.relation_checks += checks
                group = (a, b)
                group_ids = ids_of(mask)
                for (e1, e2, r), per_seq in sorted(found.items()):
                    cnt = len(per_seq)
                    if not self._confident(cnt, max_c):
                        continue
                    pat = TemporalPattern((e1, e2), (r,))
                    insert_pattern(h2, group, pat, list(per_seq), per_seq, group_ids)
                    if self._emits(cnt):
                        emitted.append(self._result(pat, per_seq, max_c))
        self.h2 = h2
        self._pair_index = {}
        for pat, m in h2.masks.items():
            self._pair_index.setdefault((pat.events[0], pat.events[1]), []).append((pat.relations[0], m))
        return h2, emitted

    def _result(self, pat: TemporalPattern, per_seq: dict, max_c: int) -> PatternResult:
        ids = tuple(sorted(per_seq))
        return PatternResult(pat, len(ids), self.n, max_c, ids, tuple(tuple(per_seq[s]) for s in ids))

    def mine_k(self, prev: HLHk, k: int, c: Counters) -> tuple[HLHk, list[PatternResult]]:
        cfg, h1 = self.cfg, self.h1
        hk = HLHk(k)
        emitted: list[PatternResult] = []
        f1 = h1.events()
        filtered = prev.events() & set(f1) if cfg.pruning.transitivity else None
        successors: dict[EventType, list[EventType]] = {}
        for (e1, e2) in self._pair_index:
            successors.setdefault(e1, []).append(e2)

        for P in prev.patterns():
            c.generated += len(f1)
            if cfg.pruning.transitivity:
                ext = sorted(e for e in set(successors.get(P.events[-1], ())) if e in filtered)
                c.pruned_transitivity += len(f1) - len(ext)
            else:
                ext = f1
            p_mask = prev.masks[P]
            p_max = self._max_count_of(P.events)
            for e in ext:
                mask = p_mask & h1.masks[e]
                max_c = max(p_max, self.counts[e])
                if cfg.pruning.apriori and not self._confident(_popcount(mask), max_c):
                    c.pruned_apriori += 1
                    continue
                c.candidates += 1
                if cfg.pruning.transitivity:
                    found = self._extend_by_triples(P, e, mask, max_c)
                else:
                    found = self._extend_by_witnesses(P, e, mask)
                for Q, per_seq in sorted(found.items(), key=lambda kv: kv[0]):
                    cnt = len(per_seq)
                    if not self._confident(cnt, max_c):
                        continue
                    insert_pattern(hk, Q.group(), Q, list(per_seq), per_seq)
                    if self._emits(cnt):
                        emitted.append(self._result(Q, per_seq, max_c))
        c.relation_checks += self.tally[0]
        self.tally[0] = 0
        return hk, emitted

    def _extend_by_triples(self, P: TemporalPattern, e: EventType, mask: int, max_c: int) -> dict:
        """Assemble relations to the new slot from stored 2-patterns, last slot first."""
        k1 = P.k
        options = []
        for i in range(k1):
            opts = self._pair_index.get((P.events[i], e))
            if not opts:
                return {}
            options.append(opts)
        out: dict[TemporalPattern, dict[int, tuple]] = {}
        rels = [None] * k1
        db, cfg = self.db, self.cfg
        events = P.events + (e,)

        def descend(i: int, m: int):
            if i < 0:
                Q = TemporalPattern(events, P.relations + tuple(rels))
                per_seq = {}
                for sid in ids_of(m):
                    ok, w = sequence_supports(db.sequences[sid], Q, cfg, self.tally)
                    if ok:
                        per_seq[sid] = w
                if per_seq:
                    out[Q] = per_seq
                return
            for r, m2 in options[i]:
                nm = m & m2
                if not self._confident(_popcount(nm), max_c):
                    continue
                rels[i] = r
                descend(i - 1, nm)

        descend(k1 - 1, mask)
        return out

    def _extend_by_witnesses(self, P: TemporalPattern, e: EventType, mask: int) -> dict:
        """Extend every witness of the prefix with each later instance of ``e``."""
        cfg, db = self.cfg, self.db
        eps, d_o, t_max = cfg.epsilon, cfg.d_o, cfg.t_max
        events = P.events + (e,)
        out: dict[TemporalPattern, dict[int, tuple]] = {}
        checks = 0
        for sid in ids_of(mask):
            seq = db.sequences[sid]
            inst = seq.instances
            pe = seq.positions(e)
            for wpos in iter_witnesses(seq, P, cfg, self.tally):
                first = inst[wpos[0]].start
                max_end = max(inst[p].end for p in wpos)
                for q in pe:
                    if q <= wpos[-1]:
                        continue
                    ej = inst[q].interval
                    if ej.start - first > t_max:
                        break
                    if max(max_end, ej.end) - first > t_max:
                        continue
                    rels = []
                    for p in wpos:
                        ei = inst[p].interval
                        checks += 1
                        r = _relation(ei.start, ei.end, ej.start, ej.end, eps, d_o)
                        if r is None:
                            break
                        rels.append(r)
                    else:
                        Q = TemporalPattern(events, P.relations + tuple(rels))
                        per_seq = out.setdefault(Q, {})
                        if sid not in per_seq:
                            per_seq[sid] = tuple(inst[p] for p in wpos) + (inst[q],)
        self.tally[0] += checks
        return out

    def run(self, allowed_events=None) -> MiningReport:
        cfg = self.cfg
        report = MiningReport(cfg, self.n)
        t0 = time.perf_counter()
        h1 = self.level1(allowed_events)
        report.hlh[1] = h1
        report.levels[1] = [
            PatternResult(TemporalPattern((ev,), ()), len(ids), self.n, len(ids), tuple(ids))
            for ev, ids in sorted(h1.EH.items())
        ]
        report.level_counters[1] = Counters()
        prev = None
        for k in range(2, cfg.max_pattern_len + 1):
            c = Counters()
            if k == 2:
                hk, emitted = self.mine_pairs(c)
            else:
                hk, emitted = self.mine_k(prev, k, c)
            report.level_counters[k] = c
            report.counters.add(c)
            report.hlh[k] = hk
            if emitted:
                report.levels[k] = sorted(emitted, key=lambda r: r.pattern)
            if len(hk) == 0:
                break
            prev = hk
        report.timings["mining_seconds"] = time.perf_counter() - t0
        return report


def mine(db: SequenceDatabase, cfg: MiningConfig) -> MiningReport:
    """Mine every pattern meeting ``cfg``'s thresholds, exactly."""
    if not isinstance(cfg, MiningConfig):
        raise TypeError("cfg must be a MiningConfig")
    return _Engine(db, cfg).run()


def mine_pairs(h1: HLH1, db: SequenceDatabase, cfg: MiningConfig, counters: Optional[Counters] = None) -> HLHk:
    """Level-2 step on a prebuilt level-1 index."""
    eng = _Engine(db, cfg)
    eng.h1 = h1
    eng.counts = {ev: len(ids) for ev, ids in h1.EH.items()}
    h2, _ = eng.mine_pairs(counters or Counters())
    return h2


def mine_k(prev: HLHk, h1: HLH1, h2: HLHk, db: SequenceDatabase, cfg: MiningConfig, k: int,
           counters: Optional[Counters] = None) -> HLHk:
    """Level-k step (k >= 3) from the stored (k-1)-level, level-1 and level-2 indexes."""
    if k < 3 or prev.k != k - 1:
        raise ValueError("mine_k extends level k-1 to level k for k >= 3")
    eng = _Engine(db, cfg)
    eng.h1, eng.h2 = h1, h2
    eng.counts = {ev: len(ids) for ev, ids in h1.EH.items()}
    eng._pair_index = {}
    for pat, m in h2.masks.items():
        eng._pair_index.setdefault((pat.events[0], pat.events[1]), []).append((pat.relations[0], m))
    hk, _ = eng.mine_k(prev, k, counters or Counters())
    return hk


# --- approximate mining ---------------------------------------------------

_INV_E = float(np.exp(-1.0))


def series_pair_thresholds(cfg: MiningConfig, joint: np.ndarray, theta: Optional[np.ndarray] = None) -> MuThresholds:
    """Most permissive NMI thresholds over every target cell of one joint table.

    ``joint`` holds probabilities over observed symbols only. ``theta``
    optionally gives the windowed correction per cell.
    """
    nx, ny = joint.shape
    per_target = []
    for i in range(nx):
        for j in range(ny):
            st = stats_from_joint(joint, i, j)
            if theta is not None:
                st = _with_theta(st, float(theta[i, j]))
            per_target.append(select_mu(cfg, st))
    return combine_thresholds(per_target)


def _with_theta(st, theta: float):
    return replace(st, vartheta=theta, supp_seq=st.supp_syb + theta)


def _entropy_rows(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -terms.reshape(p.shape[0], -1).sum(axis=1)


def batch_nmi(joints: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """NMI in both directions for a stack of joint tables ``(pairs, nx, ny)``."""
    hx = _entropy_rows(joints.sum(axis=2))
    hy = _entropy_rows(joints.sum(axis=1))
    mi = np.maximum(hx + hy - _entropy_rows(joints), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        xy = np.where(hx > 1e-15, np.minimum(mi / hx, 1.0), 0.0)
        yx = np.where(hy > 1e-15, np.minimum(mi / hy, 1.0), 0.0)
    return xy, yx


def _min_cond(joints: np.ndarray, a: int, b: int, marg: np.ndarray):
    # smallest p(row | col) off row a and column b, with its joint mass
    nx, ny = joints.shape[1:]
    rows = [r for r in range(nx) if r != a]
    cols = [c for c in range(ny) if c != b]
    sub = joints[:, rows][:, :, cols].reshape(joints.shape[0], -1)
    den = np.repeat(marg[:, cols][:, None, :], len(rows), axis=1).reshape(joints.shape[0], -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = sub / den
    k = np.argmin(cond, axis=1)
    idx = np.arange(joints.shape[0])
    return sub[idx, k], cond[idx, k]


def batch_thresholds(cfg: MiningConfig, joints: np.ndarray, theta: Optional[np.ndarray] = None):
    """Vectorised :func:`series_pair_thresholds` over a stack of equally shaped joint tables.

    Returns ``(mu_min, mu_max)`` arrays; ``mu_max`` is NaN where unbounded.
    """
    P, nx, ny = joints.shape
    if nx < 2 or ny < 2:
        return np.zeros(P), np.full(P, np.nan)
    px, py = joints.sum(axis=2), joints.sum(axis=1)
    sigma, delta = cfg.sigma_min, cfg.delta
    rare = cfg.mode is Mode.RARE and cfg.sigma_max is not None
    mu_min = np.full(P, np.inf)
    mu_max = np.full(P, -np.inf)
    unbounded = np.zeros(P, dtype=bool)
    inv_e, ln2 = _INV_E, np.log(2.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for i in range(nx):
            for j in range(ny):
                keep = py[:, j] >= px[:, i]
                l1 = np.where(keep, px.min(axis=1), py.min(axis=1))
                l5 = np.where(keep, px.max(axis=1), py.max(axis=1))
                l2 = np.where(keep, py[:, j], px[:, i])
                n_x = np.where(keep, nx, ny)
                has_cond = nx >= 2 and ny >= 2
                if has_cond:
                    m_a, c_a = _min_cond(joints, i, j, py)
                    m_b, c_b = _min_cond(np.transpose(joints, (0, 2, 1)), j, i, px)
                    l3 = np.where(keep, m_a, m_b)
                    l4 = np.where(keep, c_a, c_b)
                ok = (l1 > 0) & (l1 < 1) & (l2 > 0) & (l2 <= 1)
                best = np.full(P, -np.inf)
                if sigma > 0.0:
                    ratio = sigma / l2
                    m1 = np.where(ratio <= inv_e,
                                  1.0 - l2 / (np.e * ln2 * np.log2(1.0 / l1)),
                                  1.0 - sigma * np.log(ratio) / (ln2 * np.log2(l1)))
                    best = np.where(m1 <= 1.0, np.fmax(best, m1), best)
                if has_cond and 0.0 < sigma < 1.0 and delta > 0.0:
                    inner = (delta / sigma) * ((1.0 - sigma) / (n_x - 1)) ** (l3 / sigma)
                    m2 = 1.0 - sigma * np.log(inner) / np.log(l1)
                    best = np.where(m2 <= 1.0, np.fmax(best, m2), best)
                target = np.where(ok & np.isfinite(best), np.maximum(best, 0.0), 0.0)
                mu_min = np.minimum(mu_min, target)
                if rare:
                    th = theta[:, i, j] if theta is not None else np.zeros(P)
                    s = cfg.sigma_max - th
                    good = (s > 0) & (s / l2 >= inv_e) & (l5 > 0) & (l5 < 1)
                    if has_cond:
                        good &= (l4 > 0) & (l4 < 1)
                        m3 = 1.0 - (s * np.log(s / l2) + (1.0 - sigma) * np.log(l4)) / np.log(l5)
                    else:
                        m3 = np.full(P, np.nan)
                    good &= m3 < 1.0
                    unbounded |= ~good
                    mu_max = np.where(good, np.fmax(mu_max, np.maximum(m3, 0.0)), mu_max)
    if not rare:
        return mu_min, np.full(P, np.nan)
    return mu_min, np.where(unbounded, np.nan, mu_max)


def _cell_theta(xc: np.ndarray, yc: np.ndarray, nx: int, ny: int, block: int) -> np.ndarray:
    n = xc.size
    blocks = np.arange(n) // block
    nb = int(blocks[-1]) + 1
    cells = xc * ny + yc
    per = np.bincount(blocks * (nx * ny) + cells, minlength=nb * nx * ny).reshape(nb, nx * ny)
    sizes = np.bincount(blocks, minlength=nb)
    seq = (sizes[:, None] * (per > 0)).sum(axis=0)
    syb = per.sum(axis=0)
    return ((seq - syb) / n).reshape(nx, ny)


def accuracy(approx: MiningReport, exact: MiningReport) -> float:
    """Share of exact patterns (with their supports) that the approximation also reports."""
    ex = exact.pattern_keys()
    if not ex:
        return 1.0
    return len(ex & approx.pattern_keys()) / len(ex)


def mine_approximate(db_syb: SymbolicDatabase, cfg: MiningConfig, window: int, overlap: int = 0,
                     t_max: Optional[int] = None) -> MiningReport:
    """Mine only over series pairs whose mutual dependence can meet the thresholds.

    For every series pair the NMI in both directions is compared with the
    thresholds derived from the pair's symbol distribution; a pair is kept
    when the smaller NMI lies within them. Single events come from series
    in a kept pair; level-2 candidates are restricted to kept pairs and
    same-series pairs of kept series.
    """
    if not isinstance(db_syb, SymbolicDatabase):
        raise TypeError("mine_approximate expects a SymbolicDatabase")
    t0 = time.perf_counter()
    ids = db_syb.series_ids
    n = len(db_syb)
    coded = []
    for s in db_syb.series:
        codes = s.codes()
        used = np.flatnonzero(np.bincount(codes, minlength=len(s.alphabet)))
        remap = np.full(len(s.alphabet), -1, dtype=np.int64)
        remap[used] = np.arange(used.size)
        coded.append(remap[codes])
    sizes = [int(c.max()) + 1 for c in coded]
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    onehot = np.zeros((n, int(offsets[-1])), dtype=np.float64)
    for col, c in enumerate(coded):
        onehot[np.arange(n), offsets[col] + c] = 1.0
    counts = onehot.T @ onehot
    block = max(1, window // db_syb.period)
    rare = cfg.mode is Mode.RARE and cfg.sigma_max is not None

    constant = [ids[i] for i, sz in enumerate(sizes) if sz == 1]
    by_shape: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            by_shape.setdefault((sizes[a], sizes[b]), []).append((a, b))
    kept_pairs: set[frozenset] = set()
    pair_log = []
    for (nx, ny), pairs in sorted(by_shape.items()):
        joints = np.stack([counts[offsets[a]:offsets[a + 1], offsets[b]:offsets[b + 1]] for a, b in pairs]) / n
        theta = None
        if rare:
            theta = np.stack([_cell_theta(coded[a], coded[b], nx, ny, block) for a, b in pairs])
        xy, yx = batch_nmi(joints)
        score = np.minimum(xy, yx)
        lo, hi = batch_thresholds(cfg, joints, theta)
        keep = (score >= lo) & (np.isnan(hi) | (score <= hi))
        for (a, b), sc, l, h, k in zip(pairs, score, lo, hi, keep):
            if k:
                kept_pairs.add(frozenset((ids[a], ids[b])))
            pair_log.append((ids[a], ids[b], float(sc), float(l), None if np.isnan(h) else float(h), bool(k)))
    mi_seconds = time.perf_counter() - t0

    surviving = sorted({s for p in kept_pairs for s in p})
    n_pairs = len(ids) * (len(ids) - 1) // 2
    t1 = time.perf_counter()
    report: MiningReport
    if surviving:
        seq_db = build_sequence_db(db_syb.subset(surviving), window, overlap, t_max)
    else:
        seq_db = build_sequence_db(db_syb, window, overlap, t_max)
    split_seconds = time.perf_counter() - t1

    def pair_allowed(x: EventType, y: EventType) -> bool:
        return x.series == y.series or frozenset((x.series, y.series)) in kept_pairs

    keep_series = set(surviving)
    allowed_events = {ev for ev in seq_db.events() if ev.series in keep_series}
    report = _Engine(seq_db, cfg, pair_allowed).run(allowed_events)
    report.timings["mi_seconds"] = mi_seconds
    report.timings["split_seconds"] = split_seconds
    report.prune_log = {
        "n_series": len(ids),
        "pruned_series": [s for s in ids if s not in set(surviving)],
        "pruned_series_pct": 100.0 * (len(ids) - len(surviving)) / len(ids),
        "n_pairs": n_pairs,
        "kept_pairs": len(kept_pairs),
        "pruned_pairs_pct": 100.0 * (n_pairs - len(kept_pairs)) / n_pairs if n_pairs else 0.0,
        "constant_series": constant,
        "pairs": [
            {"x": x, "y": y, "nmi": s, "mu_min": lo, "mu_max": hi, "kept": k}
            for x, y, s, lo, hi, k in pair_log
        ],
    }
    return report
