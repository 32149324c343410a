"""From raw time series to a temporal sequence database.

raw values --symbolize--> symbolic series --extract_events--> temporal
events --build_sequence_db--> overlapping-window sequences.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .core import EventInstance, EventType, Interval, SequenceDatabase, TemporalSequence

__all__ = [
    "RawSeries",
    "AlphabetSpec",
    "SymbolicSeries",
    "SymbolicDatabase",
    "TemporalEvent",
    "IngestionError",
    "symbolize",
    "extract_events",
    "build_sequence_db",
    "Symbolizer",
    "SequenceSplitter",
]


class IngestionError(ValueError):
    """Malformed input series (irregular timestamps, length mismatch, ...)."""


def _check_grid(timestamps: np.ndarray, what: str) -> int:
    if timestamps.ndim != 1 or timestamps.size == 0:
        raise IngestionError(f"{what}: timestamps must be a non-empty 1-d array")
    if timestamps.size == 1:
        return 1
    steps = np.diff(timestamps)
    if (steps <= 0).any():
        bad = int(np.argmax(steps <= 0)) + 1
        raise IngestionError(f"{what}: timestamps not strictly increasing at index {bad}")
    if (steps != steps[0]).any():
        bad = int(np.argmax(steps != steps[0])) + 1
        raise IngestionError(f"{what}: irregular sampling at index {bad} (gaps are not resampled)")
    return int(steps[0])


@dataclass(frozen=True)
class RawSeries:
    series_id: str
    timestamps: np.ndarray
    values: np.ndarray
    period: int = 0

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.int64)
        vals = np.asarray(self.values, dtype=float)
        if ts.shape != vals.shape:
            raise IngestionError(f"{self.series_id}: {ts.size} timestamps but {vals.size} values")
        step = _check_grid(ts, self.series_id)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "period", self.period or step)


@dataclass(frozen=True)
class AlphabetSpec:
    """Ordered symbols of one variable and how values map onto them.

    With ``thresholds`` (ascending, one fewer than symbols) a value ``v``
    gets ``symbols[i]`` where ``i`` counts thresholds ``<= v``. Without
    thresholds the bins are equal-count quantiles fitted on the data.
    ``lower``/``upper`` close the outer bins; values outside raise.
    """

    symbols: tuple[str, ...]
    thresholds: Optional[tuple[float, ...]] = None
    lower: Optional[float] = None
    upper: Optional[float] = None

    def __post_init__(self):
        syms = tuple(str(s) for s in self.symbols)
        if not syms:
            raise ValueError("alphabet must be non-empty")
        if len(set(syms)) != len(syms):
            raise ValueError("alphabet symbols must be unique")
        object.__setattr__(self, "symbols", syms)
        if self.thresholds is not None:
            thr = tuple(float(t) for t in self.thresholds)
            if len(thr) != len(syms) - 1:
                raise ValueError("need exactly len(symbols) - 1 thresholds")
            if any(b <= a for a, b in zip(thr, thr[1:])):
                raise ValueError("thresholds must be strictly ascending")
            object.__setattr__(self, "thresholds", thr)

    @classmethod
    def binary(cls, threshold: float, low: str = "Off", high: str = "On") -> "AlphabetSpec":
        return cls((low, high), (threshold,))

    @classmethod
    def quantiles(cls, n: int, prefix: str = "q") -> "AlphabetSpec":
        return cls(tuple(f"{prefix}{i}" for i in range(n)))


@dataclass(frozen=True)
class SymbolicSeries:
    series_id: str
    timestamps: np.ndarray
    symbols: np.ndarray
    alphabet: tuple[str, ...]
    period: int = 0

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.int64)
        syms = np.asarray(self.symbols, dtype=object)
        if ts.shape != syms.shape:
            raise IngestionError(f"{self.series_id}: timestamps and symbols differ in length")
        step = _check_grid(ts, self.series_id)
        alphabet = tuple(self.alphabet) if self.alphabet else tuple(dict.fromkeys(syms.tolist()))
        unknown = set(syms.tolist()) - set(alphabet)
        if unknown:
            raise IngestionError(f"{self.series_id}: symbols {sorted(unknown)} not in alphabet")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "symbols", syms)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "period", self.period or step)

    def __len__(self):
        return self.symbols.size

    def codes(self) -> np.ndarray:
        """Symbols as integer indices into the alphabet."""
        index = {s: i for i, s in enumerate(self.alphabet)}
        return np.fromiter((index[s] for s in self.symbols), dtype=np.int64, count=self.symbols.size)


@dataclass(frozen=True)
class SymbolicDatabase:
    series: tuple[SymbolicSeries, ...]

    def __post_init__(self):
        series = tuple(self.series)
        if not series:
            raise IngestionError("symbolic database needs at least one series")
        ids = [s.series_id for s in series]
        if len(set(ids)) != len(ids):
            raise IngestionError("duplicate series ids")
        ref = series[0]
        for s in series[1:]:
            if len(s) != len(ref) or not np.array_equal(s.timestamps, ref.timestamps):
                raise IngestionError(f"{s.series_id}: not aligned with {ref.series_id}")
        object.__setattr__(self, "series", series)

    @property
    def timestamps(self) -> np.ndarray:
        return self.series[0].timestamps

    @property
    def period(self) -> int:
        return self.series[0].period

    @property
    def series_ids(self) -> list[str]:
        return [s.series_id for s in self.series]

    def __len__(self):
        return len(self.series[0])

    def __getitem__(self, series_id: str) -> SymbolicSeries:
        for s in self.series:
            if s.series_id == series_id:
                return s
        raise KeyError(series_id)

    def subset(self, series_ids: Sequence[str]) -> "SymbolicDatabase":
        keep = set(series_ids)
        return SymbolicDatabase(tuple(s for s in self.series if s.series_id in keep))

    @classmethod
    def from_rows(cls, timestamps, columns: Mapping[str, Sequence[str]], alphabets=None) -> "SymbolicDatabase":
        alphabets = alphabets or {}
        return cls(tuple(
            SymbolicSeries(sid, timestamps, np.asarray(list(col), dtype=object), tuple(alphabets.get(sid, ())))
            for sid, col in columns.items()
        ))


@dataclass(frozen=True)
class TemporalEvent:
    event: EventType
    intervals: tuple[Interval, ...]

    def instances(self) -> list[EventInstance]:
        return [EventInstance(self.event, iv) for iv in self.intervals]


def _fit_quantile_thresholds(values: np.ndarray, n: int) -> tuple[float, ...]:
    if n == 1:
        return ()
    qs = np.quantile(values, np.arange(1, n) / n)
    return tuple(float(q) for q in qs)


def _digitize(values: np.ndarray, spec: AlphabetSpec, thresholds, series_id: str) -> np.ndarray:
    if spec.lower is not None and (values < spec.lower).any():
        raise ValueError(f"{series_id}: value below the lowest bin")
    if spec.upper is not None and (values > spec.upper).any():
        raise ValueError(f"{series_id}: value above the highest bin")
    idx = np.searchsorted(np.asarray(thresholds, dtype=float), values, side="right")
    return np.asarray(spec.symbols, dtype=object)[idx]


def symbolize(raw: RawSeries, spec: AlphabetSpec) -> SymbolicSeries:
    """Map every value of ``raw`` to a symbol of ``spec``; length is preserved.

    >>> raw = RawSeries("X", [0, 1, 2, 3], [1.61, 1.21, 0.41, 0.0])
    >>> list(symbolize(raw, AlphabetSpec.binary(0.5)).symbols)
    ['On', 'On', 'Off', 'Off']
    """
    thresholds = spec.thresholds
    if thresholds is None:
        thresholds = _fit_quantile_thresholds(raw.values, len(spec.symbols))
    syms = _digitize(raw.values, spec, thresholds, raw.series_id)
    return SymbolicSeries(raw.series_id, raw.timestamps, syms, spec.symbols, raw.period)


def _runs(codes: np.ndarray):
    """Start index, stop index (exclusive) and code of each maximal run."""
    n = codes.size
    change = np.flatnonzero(codes[1:] != codes[:-1]) + 1
    starts = np.concatenate(([0], change))
    stops = np.concatenate((change, [n]))
    return starts, stops, codes[starts]


def extract_events(xs: SymbolicSeries) -> list[TemporalEvent]:
    """Merge maximal runs of one symbol into instances ``[run start, last + period]``.

    Adjacent runs tile the time axis, so every sample is covered by
    exactly one instance. Events come back in alphabet order; symbols that
    never occur produce no event.
    """
    if len(xs) == 0:
        raise ValueError("cannot extract events from an empty series")
    codes = xs.codes()
    starts, stops, run_codes = _runs(codes)
    ts = xs.timestamps
    t_start = ts[starts]
    t_end = ts[stops - 1] + xs.period
    out = []
    for c, sym in enumerate(xs.alphabet):
        mask = run_codes == c
        if not mask.any():
            continue
        ivs = tuple(Interval(int(a), int(b)) for a, b in zip(t_start[mask], t_end[mask]))
        out.append(TemporalEvent(EventType(xs.series_id, sym), ivs))
    return out


def _window_starts(t0: int, t_end: int, window: int, step: int) -> list[int]:
    starts = []
    s = t0
    while s < t_end:
        starts.append(s)
        if s + window >= t_end:
            break
        s += step
    return starts


def build_sequence_db(db: SymbolicDatabase, window: int, t_ov: int = 0, t_max: Optional[int] = None) -> SequenceDatabase:
    """Split ``db`` into windows of ``window`` ticks overlapping by ``t_ov``.

    Consecutive windows advance by ``window - t_ov``. Every instance
    intersecting a window is included, clipped to the window bounds.
    """
    if t_max is None:
        t_max = window
    if window < db.period:
        raise ValueError(f"window ({window}) is shorter than one sample period ({db.period})")
    if not 0 <= t_ov <= t_max:
        raise ValueError("need 0 <= t_ov <= t_max")
    if t_max > window:
        raise ValueError("t_max must not exceed the window length")
    if t_ov >= window:
        raise ValueError("overlap must be shorter than the window")
    ts = db.timestamps
    t0, t_end = int(ts[0]), int(ts[-1]) + db.period
    wstarts = np.asarray(_window_starts(t0, t_end, window, window - t_ov), dtype=np.int64)
    wends = wstarts + window

    per_window: list[list[EventInstance]] = [[] for _ in range(wstarts.size)]
    for xs in db.series:
        codes = xs.codes()
        rs, re_, rc = _runs(codes)
        r_start = ts[rs]
        r_end = ts[re_ - 1] + xs.period
        events = [EventType(xs.series_id, sym) for sym in xs.alphabet]
        lo = np.searchsorted(r_end, wstarts, side="right")
        hi = np.searchsorted(r_start, wends, side="left")
        for w in range(wstarts.size):
            ws, we = int(wstarts[w]), int(wends[w])
            bucket = per_window[w]
            for r in range(lo[w], hi[w]):
                a = max(int(r_start[r]), ws)
                b = min(int(r_end[r]), we)
                if a < b:
                    bucket.append(EventInstance(events[rc[r]], Interval(a, b)))
    seqs = tuple(TemporalSequence(i, tuple(inst)) for i, inst in enumerate(per_window))
    return SequenceDatabase(seqs, window_length=window, overlap=t_ov)


class Symbolizer(TransformerMixin, BaseEstimator):
    """Column-wise symbolization of a ``(n_samples, n_series)`` value matrix.

    Parameters
    ----------
    n_symbols : int
        Number of equal-count bins when ``thresholds`` is not given.
    thresholds : sequence of float or dict, optional
        Shared ascending cut points, or a mapping ``column index -> cut points``.
    symbols : sequence of str, optional
        Symbol names; defaults to ``q0 .. q{n-1}``.
    """

    def __init__(self, n_symbols=3, thresholds=None, symbols=None):
        self.n_symbols = n_symbols
        self.thresholds = thresholds
        self.symbols = symbols

    def _spec(self, col: int, n: int) -> AlphabetSpec:
        syms = self.symbols or tuple(f"q{i}" for i in range(n))
        return AlphabetSpec(tuple(syms))

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ValueError("expected a 2-d array (n_samples, n_series)")
        self.n_features_in_ = X.shape[1]
        self.thresholds_ = []
        for j in range(X.shape[1]):
            thr = self.thresholds
            if isinstance(thr, Mapping):
                thr = thr.get(j)
            if thr is None:
                n = len(self.symbols) if self.symbols else self.n_symbols
                thr = _fit_quantile_thresholds(X[:, j], n)
            self.thresholds_.append(tuple(float(t) for t in thr))
        self.alphabets_ = [self._spec(j, len(t) + 1).symbols for j, t in enumerate(self.thresholds_)]
        return self

    def transform(self, X):
        check_is_fitted(self, "thresholds_")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns")
        out = np.empty(X.shape, dtype=object)
        for j, thr in enumerate(self.thresholds_):
            idx = np.searchsorted(np.asarray(thr, dtype=float), X[:, j], side="right")
            out[:, j] = np.asarray(self.alphabets_[j], dtype=object)[idx]
        return out


class SequenceSplitter(TransformerMixin, BaseEstimator):
    """Stateless wrapper around :func:`build_sequence_db` for pipelines."""

    def __init__(self, window=None, overlap=0, t_max=None):
        self.window = window
        self.overlap = overlap
        self.t_max = t_max

    def fit(self, X, y=None):
        return self

    def transform(self, X: SymbolicDatabase) -> SequenceDatabase:
        if not isinstance(X, SymbolicDatabase):
            raise TypeError("SequenceSplitter expects a SymbolicDatabase")
        window = self.window or len(X) * X.period
        return build_sequence_db(X, window, self.overlap, self.t_max)
