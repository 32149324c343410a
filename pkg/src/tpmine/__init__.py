"""Temporal pattern mining over multivariate time series."""
from .core import (
    EventInstance,
    EventType,
    Interval,
    MiningConfig,
    Mode,
    Pruning,
    RelationKind,
    RelationTriple,
    SequenceDatabase,
    TemporalPattern,
    TemporalSequence,
    classify_relation,
    sequence_supports,
)
from .estimators import ApproximatePatternMiner, TemporalPatternMiner
from .miner import MiningReport, PatternResult, mine, mine_approximate
from .oracle import brute_force_mine
from .transform import (
    AlphabetSpec,
    RawSeries,
    SequenceSplitter,
    SymbolicDatabase,
    SymbolicSeries,
    Symbolizer,
    build_sequence_db,
    extract_events,
    symbolize,
)

__all__ = [
    "AlphabetSpec",
    "ApproximatePatternMiner",
    "EventInstance",
    "EventType",
    "Interval",
    "MiningConfig",
    "MiningReport",
    "Mode",
    "PatternResult",
    "Pruning",
    "RawSeries",
    "RelationKind",
    "RelationTriple",
    "SequenceDatabase",
    "SequenceSplitter",
    "SymbolicDatabase",
    "SymbolicSeries",
    "Symbolizer",
    "TemporalPattern",
    "TemporalPatternMiner",
    "TemporalSequence",
    "brute_force_mine",
    "build_sequence_db",
    "classify_relation",
    "extract_events",
    "mine",
    "mine_approximate",
    "sequence_supports",
    "symbolize",
]

__version__ = "0.1.0"
