import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import ev, example_sequences, inst, seq_db
from tpmine.core import MiningConfig, RelationKind, TemporalPattern
from tpmine.io import running_example
from tpmine.measures import (
    conditional_entropy,
    conf_pair,
    conf_pattern,
    entropy,
    joint_counts,
    min_conditional,
    mutual_information,
    nmi,
    pair_statistics,
    stats_from_joint,
    supp_event,
    supp_group,
    supp_pattern,
    windowed_support,
)


def test_w_off_support():
    s = supp_event(example_sequences(), ev("W", "Off"))
    assert (s.count, s.n_sequences, s.relative) == (2, 4, 0.5)


def test_group_support_and_errors():
    db = example_sequences()
    assert supp_group(db, [ev("S", "On"), ev("T", "On")]).count == 3
    with pytest.raises(ValueError):
        supp_group(db, [])
    with pytest.raises(KeyError):
        supp_event(db, ev("Q", "On"))


def test_pair_confidence_by_recount():
    db = example_sequences()
    s_on, t_on = ev("S", "On"), ev("T", "On")
    both = sum(1 for s in db if s_on in s.events() and t_on in s.events())
    singles = [sum(1 for s in db if e in s.events()) for e in (s_on, t_on)]
    assert conf_pair(db, s_on, t_on) == both / max(singles)


def test_single_event_confidence_is_one():
    assert conf_pattern(example_sequences(), TemporalPattern((ev("S", "On"),), ())) == 1.0


def test_pattern_confidence_full_support():
    db = seq_db([inst("A", "x", 0, 5), inst("B", "x", 6, 9)], [inst("A", "x", 0, 5), inst("B", "x", 7, 9)])
    p = TemporalPattern((ev("A", "x"), ev("B", "x")), (RelationKind.FOLLOWS,))
    assert supp_pattern(db, p, MiningConfig(t_max=20)).count == 2
    assert conf_pattern(db, p, MiningConfig(t_max=20)) == 1.0


def test_entropy_values():
    assert entropy([0.5, 0.5]) == 1.0
    assert entropy([1.0, 0.0]) == 0.0
    assert math.isclose(entropy([0.25] * 4), 2.0)


def test_nmi_of_identical_and_independent():
    joint = np.diag([0.2, 0.3, 0.5])
    assert math.isclose(nmi(joint), 1.0)
    product = np.outer([0.3, 0.7], [0.6, 0.4])
    assert abs(mutual_information(product)) < 1e-12 and nmi(product) < 1e-12
    assert nmi(np.array([[0.4, 0.6]])) == 0.0
    with pytest.raises(ValueError):
        nmi(joint, "zz")


def test_two_by_two_mutual_information():
    joint = np.array([[0.4, 0.1], [0.1, 0.4]])
    by_hand = 2 * 0.4 * math.log2(0.4 / 0.25) + 2 * 0.1 * math.log2(0.1 / 0.25)
    assert math.isclose(mutual_information(joint), by_hand, rel_tol=1e-12)
    assert math.isclose(mutual_information(joint), entropy([0.5, 0.5]) - conditional_entropy(joint), rel_tol=1e-12)
    assert math.isclose(nmi(joint), by_hand)


def test_windowed_support_identity_and_unit_block():
    co = np.array([0, 1, 0, 0, 0, 0, 1, 1, 0], dtype=bool)
    w = windowed_support(co, 3)
    assert (w.seq_count, w.syb_count, w.theta_count, w.n) == (6, 3, 3, 9)
    w1 = windowed_support(co, 1)
    assert w1.theta_count == 0 and w1.supp_seq == w1.supp_syb
    with pytest.raises(ValueError):
        windowed_support(co, 0)


def test_pair_statistics_on_example():
    db = running_example()
    st_ = pair_statistics(db, "S", "W", ("On", "On"), block=9)
    s_on = db["S"].symbols == "On"
    w_on = db["W"].symbols == "On"
    assert st_.supp_syb == float(np.mean(s_on & w_on))
    co_windows = sum(1 for s in example_sequences()
                     if any(max(a.start, b.start) < min(a.end, b.end)
                            for a in s.instances if a.event == ev("S", "On")
                            for b in s.instances if b.event == ev("W", "On")))
    assert st_.supp_seq == co_windows * 9 / 36
    assert math.isclose(st_.vartheta, st_.supp_seq - st_.supp_syb)


def test_balanced_identical_series_lambdas():
    joint = np.diag([0.5, 0.5])
    s = stats_from_joint(joint, 0, 0)
    assert s.lambda_min_x == s.lambda_max_x == 0.5
    assert s.nmi_xy == s.nmi_yx == 1.0
    assert min_conditional(np.array([[1.0]]), 0, 0) == (None, None)


def test_observed_symbols_only():
    db = running_example()
    st_ = pair_statistics(db, "S", "T", ("On", "On"))
    assert st_.joint.shape == (2, 2)


joints = st.integers(2, 4).flatmap(lambda nx: st.integers(2, 4).flatmap(
    lambda ny: st.lists(st.integers(0, 20), min_size=nx * ny, max_size=nx * ny).map(
        lambda v: np.array(v, dtype=float).reshape(nx, ny)))).filter(lambda j: j.sum() > 0)


@given(joints)
def test_nmi_in_unit_interval(counts):
    joint = counts / counts.sum()
    for d in ("xy", "yx"):
        assert 0.0 <= nmi(joint, d) <= 1.0
    assert mutual_information(joint) >= 0.0


@settings(max_examples=60)
@given(st.lists(st.tuples(st.sampled_from("ABC"), st.integers(0, 20), st.integers(1, 6)), min_size=1, max_size=6),
       st.lists(st.tuples(st.sampled_from("ABC"), st.integers(0, 20), st.integers(1, 6)), min_size=1, max_size=6))
def test_support_is_anti_monotone(a, b):
    db = seq_db([inst(s, "x", t, t + d) for s, t, d in a], [inst(s, "x", t, t + d) for s, t, d in b])
    events = sorted(db.events())
    for e in events:
        for f in events:
            assert supp_group(db, [e, f]).count <= min(supp_event(db, e).count, supp_event(db, f).count)


@given(st.lists(st.booleans(), min_size=1, max_size=50), st.integers(1, 12))
def test_windowed_identity_property(co, block):
    w = windowed_support(np.array(co), block)
    assert w.seq_count == w.syb_count + w.theta_count and w.syb_count <= w.seq_count


def test_joint_counts_shape_check():
    with pytest.raises(ValueError):
        joint_counts(np.zeros(3, int), np.zeros(4, int), 1, 1)
