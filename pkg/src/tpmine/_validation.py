"""Input checks shared by the estimators."""
from __future__ import annotations

from .core import SequenceDatabase
from .transform import SymbolicDatabase


def check_sequence_database(db) -> SequenceDatabase:
    if not isinstance(db, SequenceDatabase):
        raise TypeError(f"expected a SequenceDatabase, got {type(db).__name__}")
    if len(db) == 0:
        raise ValueError("sequence database is empty")
    return db


def check_symbolic_database(db) -> SymbolicDatabase:
    if not isinstance(db, SymbolicDatabase):
        raise TypeError(f"expected a SymbolicDatabase, got {type(db).__name__}")
    return db


def check_fraction(name: str, value, *, allow_none: bool = False):
    if value is None and allow_none:
        return None
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value
