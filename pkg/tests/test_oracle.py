import pytest

from helpers import EXAMPLE_T_MAX, example_sequences, inst, seq_db
from tpmine.core import MiningConfig, SequenceDatabase
from tpmine.oracle import OracleGuardError, brute_force_mine

# frozen from an independent run of the exhaustive miner on the appliance example
EXAMPLE_TRUTH = {
    ("IOff", 4, (0, 1, 2, 3)),
    ("IOn", 3, (0, 1, 3)),
    ("SOff", 3, (0, 1, 2)),
    ("SOn", 3, (0, 1, 3)),
    ("TOff", 3, (0, 1, 2)),
    ("TOn", 3, (0, 1, 3)),
    ("WOn", 3, (0, 1, 3)),
    ("{Follows(IOff,IOn)}", 3, (0, 1, 3)),
    ("{Contains(SOn,TOn)}", 3, (0, 1, 3)),
    ("{Contains(WOn,IOff)}", 3, (0, 1, 3)),
    ("{Contains(WOn,IOff), Contains(WOn,IOn), Follows(IOff,IOn)}", 3, (0, 1, 3)),
    ("{Contains(WOn,IOn)}", 3, (0, 1, 3)),
}


def test_example_output_is_frozen():
    cfg = MiningConfig(sigma_min=0.7, delta=0.7, t_max=EXAMPLE_T_MAX, max_pattern_len=4)
    got = {(str(r.pattern), r.count, tuple(r.sequences)) for r in brute_force_mine(example_sequences(), cfg)}
    assert got == EXAMPLE_TRUTH


def test_empty_database():
    assert brute_force_mine(SequenceDatabase(()), MiningConfig()) == []


def test_guard_on_long_patterns():
    with pytest.raises(OracleGuardError):
        brute_force_mine(example_sequences(), MiningConfig(max_pattern_len=5))


def test_single_sequence_support_is_full():
    db = seq_db([inst("A", "x", 0, 4), inst("B", "x", 1, 3), inst("C", "x", 6, 8)])
    results = brute_force_mine(db, MiningConfig(sigma_min=1.0, delta=1.0, t_max=10, max_pattern_len=3))
    assert results and all(r.count == 1 and tuple(r.sequences) == (0,) for r in results)
    assert {r.pattern.k for r in results} == {1, 2, 3}
