"""Support, confidence and information measures.

Supports over a :class:`SequenceDatabase` count sequences. Probabilities
over a :class:`SymbolicDatabase` are per-timestamp relative frequencies.
All entropies are in bits with ``0 log 0 = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import EventType, MiningConfig, SequenceDatabase, TemporalPattern, sequence_supports
from .transform import SymbolicDatabase, SymbolicSeries

__all__ = [
    "SupportStats",
    "PairStats",
    "WindowedSupport",
    "supp_event",
    "supp_group",
    "supp_pattern",
    "conf_pair",
    "conf_pattern",
    "entropy",
    "conditional_entropy",
    "mutual_information",
    "nmi",
    "joint_counts",
    "windowed_support",
    "pair_statistics",
    "stats_from_joint",
    "min_conditional",
]


@dataclass(frozen=True)
class SupportStats:
    count: int
    n_sequences: int

    @property
    def relative(self) -> float:
        return self.count / self.n_sequences if self.n_sequences else 0.0

    def as_fraction(self) -> Fraction:
        return Fraction(self.count, self.n_sequences)


def _require_db(db: SequenceDatabase):
    if len(db) == 0:
        raise ValueError("sequence database is empty")


def _check_known(db: SequenceDatabase, events: Sequence[EventType]):
    known = db.events()
    missing = [e for e in events if e not in known]
    if missing:
        raise KeyError(f"unknown event(s): {', '.join(map(str, missing))}")


def supp_event(db: SequenceDatabase, event: EventType) -> SupportStats:
    _require_db(db)
    _check_known(db, [event])
    return SupportStats(sum(1 for s in db if event in s.events()), len(db))


def supp_group(db: SequenceDatabase, events: Sequence[EventType]) -> SupportStats:
    _require_db(db)
    if not events:
        raise ValueError("event group must be non-empty")
    _check_known(db, events)
    need = set(events)
    return SupportStats(sum(1 for s in db if need <= s.events()), len(db))


def supp_pattern(db: SequenceDatabase, p: TemporalPattern, cfg: MiningConfig) -> SupportStats:
    if p.k == 1:
        return supp_event(db, p.events[0])
    _require_db(db)
    return SupportStats(sum(1 for s in db if sequence_supports(s, p, cfg)[0]), len(db))


def _max_event_count(db: SequenceDatabase, events) -> int:
    best = max(supp_event(db, e).count for e in set(events))
    if best == 0:
        raise ValueError("all constituent events are absent")
    return best


def conf_pair(db: SequenceDatabase, e_i: EventType, e_j: EventType) -> float:
    """Co-occurrence count over the larger of the two event counts."""
    return supp_group(db, [e_i, e_j]).count / _max_event_count(db, [e_i, e_j])


def conf_pattern(db: SequenceDatabase, p: TemporalPattern, cfg: Optional[MiningConfig] = None) -> float:
    if p.k == 1:
        return 1.0
    cfg = cfg or MiningConfig()
    return supp_pattern(db, p, cfg).count / _max_event_count(db, p.events)


def _plogp(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def entropy(p) -> float:
    """Shannon entropy in bits.

    >>> entropy([0.5, 0.5])
    1.0
    """
    return float(-_plogp(p).sum()) + 0.0


def conditional_entropy(joint) -> float:
    """``H(X | Y)`` for a joint table with X on rows and Y on columns."""
    joint = np.asarray(joint, dtype=float)
    return entropy(joint.ravel()) - entropy(joint.sum(axis=0))


def mutual_information(joint) -> float:
    joint = np.asarray(joint, dtype=float)
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    ratio = np.ones_like(joint)
    ratio[nz] = joint[nz] / (px @ py)[nz]
    return max(0.0, float((joint[nz] * np.log2(ratio[nz])).sum()))


def nmi(joint, direction: str = "xy") -> float:
    """Mutual information normalised by the entropy of one side.

    ``direction="xy"`` divides by ``H(X)`` (rows), ``"yx"`` by ``H(Y)``.
    A constant normalising side gives 0.
    """
    joint = np.asarray(joint, dtype=float)
    if direction == "yx":
        joint = joint.T
    elif direction != "xy":
        raise ValueError("direction must be 'xy' or 'yx'")
    hx = entropy(joint.sum(axis=1))
    if hx <= 1e-15:
        return 0.0
    return min(1.0, mutual_information(joint) / hx)


def joint_counts(x_codes: np.ndarray, y_codes: np.ndarray, nx: int, ny: int) -> np.ndarray:
    if x_codes.shape != y_codes.shape:
        raise ValueError("series lengths differ")
    return np.bincount(x_codes * ny + y_codes, minlength=nx * ny).reshape(nx, ny)


@dataclass(frozen=True)
class WindowedSupport:
    """Integer sample counts relating the two support bases.

    ``seq_count`` counts samples of every block in which the pair
    co-occurs at least once, ``syb_count`` counts co-occurring samples and
    ``theta_count = seq_count - syb_count``. Divide by ``n`` for the
    relative values.
    """

    seq_count: int
    syb_count: int
    theta_count: int
    n: int

    @property
    def supp_seq(self) -> float:
        return self.seq_count / self.n

    @property
    def supp_syb(self) -> float:
        return self.syb_count / self.n

    @property
    def theta(self) -> float:
        return self.theta_count / self.n


def windowed_support(co: np.ndarray, block: int) -> WindowedSupport:
    """Split the boolean co-occurrence indicator ``co`` into blocks of ``block`` samples."""
    co = np.asarray(co, dtype=bool)
    n = co.size
    if block < 1:
        raise ValueError("block length must be positive")
    starts = np.arange(0, n, block)
    per_block = np.add.reduceat(co.astype(np.int64), starts) if n else np.zeros(0, np.int64)
    sizes = np.minimum(starts + block, n) - starts
    hit = per_block > 0
    seq = int(sizes[hit].sum())
    syb = int(per_block.sum())
    return WindowedSupport(seq, syb, seq - syb, n)


@dataclass(frozen=True)
class PairStats:
    """Probability tables and bound parameters for one series pair and target events.

    ``target`` is the (x symbol, y symbol) pair the supports refer to.
    The ``lambda_*`` attributes follow the bound formulas of :mod:`bounds`:
    smallest and largest x marginal, y marginal of the target, joint mass
    and value of the smallest non-target conditional ``p(x_i | y_j)``.
    """

    series_x: str
    series_y: str
    alphabet_x: tuple[str, ...]
    alphabet_y: tuple[str, ...]
    target: tuple[str, str]
    joint: np.ndarray
    nmi_xy: float
    nmi_yx: float
    lambda_min_x: float
    lambda_target_y: float
    lambda_min_cond_mass: Optional[float]
    lambda_min_cond: Optional[float]
    lambda_max_x: float
    vartheta: float
    n_x: int
    supp_syb: float
    supp_seq: float

    @property
    def px(self) -> np.ndarray:
        return self.joint.sum(axis=1)

    @property
    def py(self) -> np.ndarray:
        return self.joint.sum(axis=0)

    @property
    def p_target(self) -> float:
        i = self.alphabet_x.index(self.target[0])
        j = self.alphabet_y.index(self.target[1])
        return float(self.joint[i, j])

    @property
    def lambdas(self) -> tuple:
        return (self.lambda_min_x, self.lambda_target_y, self.lambda_min_cond_mass,
                self.lambda_min_cond, self.lambda_max_x)


def _observed(series: SymbolicSeries):
    codes = series.codes()
    used = np.flatnonzero(np.bincount(codes, minlength=len(series.alphabet)))
    remap = np.full(len(series.alphabet), -1, dtype=np.int64)
    remap[used] = np.arange(used.size)
    return remap[codes], tuple(series.alphabet[u] for u in used)


def min_conditional(joint: np.ndarray, i: int, j: int):
    """Smallest ``p(x_a | y_b)`` over ``a != i`` and ``b != j`` and its joint mass.

    Returns ``(None, None)`` when either side has a single symbol.
    """
    nx, ny = joint.shape
    if nx < 2 or ny < 2:
        return None, None
    py = joint.sum(axis=0)
    rows = [a for a in range(nx) if a != i]
    cols = [b for b in range(ny) if b != j]
    sub = joint[np.ix_(rows, cols)]
    cond = sub / py[cols]
    a, b = np.unravel_index(int(np.argmin(cond)), cond.shape)
    return float(sub[a, b]), float(cond[a, b])


def stats_from_joint(joint: np.ndarray, i: int, j: int, *, series_x="X", series_y="Y",
                     alphabet_x=None, alphabet_y=None, windowed: Optional[WindowedSupport] = None) -> PairStats:
    """Build :class:`PairStats` for target cell ``(i, j)`` of a normalised joint table."""
    joint = np.asarray(joint, dtype=float)
    nx, ny = joint.shape
    alphabet_x = tuple(alphabet_x or (f"x{a}" for a in range(nx)))
    alphabet_y = tuple(alphabet_y or (f"y{b}" for b in range(ny)))
    px, py = joint.sum(axis=1), joint.sum(axis=0)
    mass, cond = min_conditional(joint, i, j)
    syb = float(joint[i, j])
    if windowed is None:
        seq, theta = syb, 0.0
    else:
        seq, theta = windowed.supp_seq, windowed.theta
    return PairStats(
        series_x, series_y, alphabet_x, alphabet_y, (alphabet_x[i], alphabet_y[j]), joint,
        nmi(joint, "xy"), nmi(joint, "yx"),
        float(px.min()), float(py[j]), mass, cond, float(px.max()),
        theta, nx, syb, seq,
    )


def pair_statistics(db_syb: SymbolicDatabase, series_x: str, series_y: str,
                    target_pair: tuple[str, str], block: Optional[int] = None) -> PairStats:
    """Single-pass statistics of ``(series_x, series_y)`` for ``target_pair``.

    Probabilities use only symbols that actually occur. ``block`` is the
    number of samples per non-overlapping window used for the correction
    term; ``None`` means no windowing (correction 0).
    """
    xs, ys = db_syb[series_x], db_syb[series_y]
    if len(xs) != len(ys):
        raise ValueError("series lengths differ")
    xc, ax = _observed(xs)
    yc, ay = _observed(ys)
    if target_pair[0] not in ax or target_pair[1] not in ay:
        raise KeyError(f"target {target_pair} does not occur in the data")
    i, j = ax.index(target_pair[0]), ay.index(target_pair[1])
    counts = joint_counts(xc, yc, len(ax), len(ay))
    joint = counts / xc.size
    windowed = windowed_support((xc == i) & (yc == j), block) if block else None
    return stats_from_joint(joint, i, j, series_x=series_x, series_y=series_y,
                            alphabet_x=ax, alphabet_y=ay, windowed=windowed)
