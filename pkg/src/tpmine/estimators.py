"""Estimator-style front ends to the miners."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_fraction, check_sequence_database, check_symbolic_database
from .core import MiningConfig, SequenceDatabase, sequence_supports
from .miner import mine, mine_approximate
from .transform import build_sequence_db

__all__ = ["TemporalPatternMiner", "ApproximatePatternMiner"]


class _PatternIndicators:
    def _indicators(self, db: SequenceDatabase) -> np.ndarray:
        check_is_fitted(self, "patterns_")
        db = check_sequence_database(db)
        cfg = self.config_
        out = np.zeros((len(db), len(self.patterns_)), dtype=bool)
        for col, p in enumerate(self.patterns_):
            for row, seq in enumerate(db):
                if p.k == 1:
                    out[row, col] = bool(seq.positions(p.events[0]))
                else:
                    out[row, col] = sequence_supports(seq, p, cfg)[0]
        return out


class TemporalPatternMiner(_PatternIndicators, TransformerMixin, BaseEstimator):
    """Exact miner over a :class:`SequenceDatabase`.

    After ``fit``: ``patterns_`` (sorted mined patterns), ``report_``
    (:class:`MiningReport`) and ``hlh_`` (per-level index structures).
    ``transform`` returns a boolean sequence-by-pattern support matrix.
    """

    def __init__(self, sigma_min=0.5, delta=0.5, sigma_max=None, epsilon=0, d_o=1, t_max=None,
                 mode="frequent", pruning="all", max_pattern_len=5):
        self.sigma_min = sigma_min
        self.delta = delta
        self.sigma_max = sigma_max
        self.epsilon = epsilon
        self.d_o = d_o
        self.t_max = t_max
        self.mode = mode
        self.pruning = pruning
        self.max_pattern_len = max_pattern_len

    def _config(self) -> MiningConfig:
        check_fraction("sigma_min", self.sigma_min)
        check_fraction("delta", self.delta)
        check_fraction("sigma_max", self.sigma_max, allow_none=True)
        kw = dict(sigma_min=self.sigma_min, delta=self.delta, sigma_max=self.sigma_max, epsilon=self.epsilon,
                  d_o=self.d_o, mode=self.mode, pruning=self.pruning, max_pattern_len=self.max_pattern_len)
        if self.t_max is not None:
            kw["t_max"] = self.t_max
        return MiningConfig(**kw)

    def fit(self, X, y=None):
        self.config_ = self._config()
        db = check_sequence_database(X)
        self.report_ = mine(db, self.config_)
        self._store(self.report_)
        return self

    def _store(self, report):
        self.patterns_ = [r.pattern for r in report.results()]
        self.hlh_ = report.hlh
        self.n_sequences_ = report.n_sequences

    def transform(self, X):
        return self._indicators(X)


class ApproximatePatternMiner(TemporalPatternMiner):
    """MI-screened miner over a :class:`SymbolicDatabase`.

    ``window`` and ``overlap`` control the split into sequences;
    ``window=None`` uses one sequence spanning the whole database.
    """

    def __init__(self, sigma_min=0.5, delta=0.5, sigma_max=None, epsilon=0, d_o=1, t_max=None,
                 mode="frequent", pruning="all", max_pattern_len=5, window=None, overlap=0):
        super().__init__(sigma_min=sigma_min, delta=delta, sigma_max=sigma_max, epsilon=epsilon, d_o=d_o,
                         t_max=t_max, mode=mode, pruning=pruning, max_pattern_len=max_pattern_len)
        self.window = window
        self.overlap = overlap

    def _window(self, db) -> int:
        return self.window or len(db) * db.period

    def fit(self, X, y=None):
        db = check_symbolic_database(X)
        self.config_ = self._config()
        self.report_ = mine_approximate(db, self.config_, self._window(db), self.overlap, self.t_max)
        self._store(self.report_)
        return self

    def transform(self, X):
        """Support matrix over ``X``; a :class:`SymbolicDatabase` is split first."""
        if not isinstance(X, SequenceDatabase):
            db = check_symbolic_database(X)
            X = build_sequence_db(db, self._window(db), self.overlap, self.t_max)
        return self._indicators(X)
