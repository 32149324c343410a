import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import example_sequences
from tpmine.core import EventType, MiningConfig, RelationKind, TemporalPattern, sequence_supports
from tpmine.io import running_example
from tpmine.transform import (
    AlphabetSpec,
    IngestionError,
    RawSeries,
    SequenceSplitter,
    SymbolicDatabase,
    SymbolicSeries,
    Symbolizer,
    build_sequence_db,
    extract_events,
    symbolize,
)


def test_binary_threshold():
    raw = RawSeries("X", np.arange(4), np.array([1.61, 1.21, 0.41, 0.0]))
    xs = symbolize(raw, AlphabetSpec.binary(0.5))
    assert xs.symbols.tolist() == ["On", "On", "Off", "Off"]


def test_constant_series():
    xs = symbolize(RawSeries("X", np.arange(10), np.full(10, 3.0)), AlphabetSpec.quantiles(3))
    assert len(set(xs.symbols.tolist())) == 1
    (event,) = extract_events(xs)
    assert [(i.start, i.end) for i in event.intervals] == [(0, 10)]


def test_quantile_ramp_is_balanced():
    xs = symbolize(RawSeries("X", np.arange(300), np.arange(300.0)), AlphabetSpec.quantiles(3))
    counts = np.bincount(xs.codes(), minlength=3)
    assert counts.sum() == 300 and np.all(np.abs(counts - 100) <= 1)


def test_alphabet_validation():
    with pytest.raises(ValueError):
        AlphabetSpec(("a", "b"), (0.5, 0.7))
    with pytest.raises(ValueError):
        AlphabetSpec(("a", "b", "c"), (0.7, 0.5))
    with pytest.raises(IngestionError):
        SymbolicSeries("X", np.arange(3), np.array(["a", "b", "z"], dtype=object), ("a", "b"))


def test_irregular_grid_rejected():
    with pytest.raises(IngestionError):
        RawSeries("X", np.array([0, 1, 3]), np.zeros(3))


def test_stove_on_instances():
    s_on = {e.event: e for e in extract_events(running_example()["S"])}[EventType("S", "On")]
    # instances end one period after their last sample; the listed values name the last sample
    assert [(i.start, i.end - 5) for i in s_on.intervals] == [(600, 615), (635, 640), (675, 685), (735, 775)]


def test_alternating_series_gives_one_instance_per_sample():
    xs = SymbolicSeries("X", np.arange(6), np.array(list("abab" "ab"), dtype=object), ("a", "b"))
    assert sum(len(e.intervals) for e in extract_events(xs)) == 6


def test_example_split_into_four_sequences():
    db = example_sequences()
    assert len(db) == 4
    assert [s.instances[0].start for s in db] == [600, 645, 690, 735]
    w_off = EventType("W", "Off")
    assert [w_off in s.events() for s in db] == [False, True, True, False]
    assert all(EventType("I", "Off") in s.events() for s in db)


def test_split_validation():
    db = running_example()
    with pytest.raises(ValueError):
        build_sequence_db(db, 4)
    with pytest.raises(ValueError):
        build_sequence_db(db, 45, t_ov=45, t_max=45)
    with pytest.raises(ValueError):
        build_sequence_db(db, 45, t_ov=10, t_max=5)
    with pytest.raises(ValueError):
        build_sequence_db(db, 45, t_ov=0, t_max=50)


def _straddle_db():
    # four one-sample-gap blocks on around t = 10, a window boundary at 10
    n = 20
    cols = {}
    for k, name in enumerate("STWI"):
        on = np.zeros(n, dtype=bool)
        start = 6 + 2 * k
        on[start:start + 2] = True
        cols[name] = np.where(on, "On", "Off")
    return SymbolicDatabase.from_rows(np.arange(n), cols, {c: ("Off", "On") for c in cols})


def test_overlap_keeps_straddling_pattern():
    db = _straddle_db()
    on = tuple(EventType(c, "On") for c in "STWI")
    p = TemporalPattern(on, (RelationKind.FOLLOWS,) * 6)
    cfg = MiningConfig(t_max=9)
    plain = build_sequence_db(db, 10, 0, 9)
    assert not any(sequence_supports(s, p, cfg)[0] for s in plain)
    overlapped = build_sequence_db(db, 10, 9, 9)
    assert any(sequence_supports(s, p, cfg)[0] for s in overlapped)


codes = st.lists(st.sampled_from("abc"), min_size=1, max_size=60)


@given(codes)
def test_instances_cover_every_sample(symbols):
    ts = np.arange(len(symbols)) * 5 + 100
    xs = SymbolicSeries("X", ts, np.array(symbols, dtype=object), ("a", "b", "c"))
    rebuilt = {}
    for event in extract_events(xs):
        for iv in event.intervals:
            for t in range(iv.start, iv.end, 5):
                assert t not in rebuilt
                rebuilt[t] = event.event.symbol
    assert [rebuilt[t] for t in ts.tolist()] == symbols


@settings(max_examples=50)
@given(st.lists(st.lists(st.sampled_from("ab"), min_size=24, max_size=24), min_size=1, max_size=3),
       st.sampled_from([4, 6, 8]), st.integers(0, 3))
def test_overlap_only_adds_coverage(columns, window, t_ov):
    # every instance-pair relation seen without overlap is seen with it
    db = SymbolicDatabase.from_rows(np.arange(24), {f"x{i}": c for i, c in enumerate(columns)},
                                    {f"x{i}": ("a", "b") for i in range(len(columns))})
    t_max = window - 1
    plain = build_sequence_db(db, window, 0, t_max)
    over = build_sequence_db(db, window, min(t_ov, t_max), t_max)
    assert len(over) >= len(plain)
    plain_events = set().union(*(s.events() for s in plain))
    over_events = set().union(*(s.events() for s in over))
    assert plain_events == over_events


def test_symbolizer_estimator():
    X = np.column_stack([np.arange(30.0), np.arange(30.0)[::-1]])
    sym = Symbolizer(n_symbols=2).fit(X)
    out = sym.transform(X)
    assert out.shape == X.shape
    assert set(np.unique(out)) <= {"q0", "q1"}
    assert sym.get_params()["n_symbols"] == 2


def test_sequence_splitter_estimator():
    db = SequenceSplitter(window=45, t_max=40).fit_transform(running_example())
    assert len(db) == 4
