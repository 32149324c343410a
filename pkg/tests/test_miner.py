from dataclasses import replace

import numpy as np
import pytest

from helpers import EXAMPLE_T_MAX, ev, example_sequences, inst, oracle_instances, seq_db
from tpmine.core import MiningConfig, RelationKind, TemporalPattern, classify_relation, pair_slots, sequence_supports
from tpmine.datagen import BlockSpec, GenSpec, generate
from tpmine.hlh import build_hlh1
from tpmine.miner import Counters, accuracy, mine, mine_approximate, mine_k, mine_pairs
from tpmine.oracle import brute_force_mine
from tpmine.transform import SymbolicDatabase, build_sequence_db

REGIMES = ("none", "apriori", "transitivity", "all")


def example_cfg(**kw):
    return MiningConfig(**{"sigma_min": 0.7, "delta": 0.7, "t_max": EXAMPLE_T_MAX, "max_pattern_len": 4, **kw})


@pytest.mark.parametrize("regime", REGIMES)
def test_example_matches_oracle_under_every_regime(regime):
    db = example_sequences()
    cfg = example_cfg(pruning=regime)
    truth = {r.key() for r in brute_force_mine(db, cfg)}
    report = mine(db, cfg)
    assert report.pattern_keys() == truth
    assert report.counters.consistent()
    assert len(report.patterns(2)) > 0


def test_example_rare_mode_matches_oracle():
    db = example_sequences()
    cfg = example_cfg(sigma_min=0.5, sigma_max=0.75, mode="rare")
    assert mine(db, cfg).pattern_keys() == {r.key() for r in brute_force_mine(db, cfg)}


def test_fig1_contains_pair():
    db = seq_db([inst("CO2", "High", 360, 600), inst("Boiler", "On", 420, 480), inst("CO2", "Low", 780, 900)])
    report = mine(db, MiningConfig(sigma_min=1.0, delta=1.0, t_max=1440))
    assert TemporalPattern((ev("CO2", "High"), ev("Boiler", "On")), (RelationKind.CONTAINS,)) in report.patterns(2)
    assert max(report.levels) == 3


def test_no_cooccurring_pair_gives_empty_level_two():
    db = seq_db([inst("A", "x", 0, 5)], [inst("B", "x", 0, 5)])
    report = mine(db, MiningConfig(sigma_min=0.5, delta=0.0, t_max=10))
    assert len(report.hlh[2]) == 0 and not report.patterns(2)
    assert len(report.single_events()) == 2


def test_frequent_mode_ignores_sigma_max():
    db = example_sequences()
    a = mine(db, example_cfg(sigma_max=0.8))
    b = mine(db, example_cfg())
    assert a.pattern_keys() == b.pattern_keys()


def test_rare_mode_with_tiny_sigma_max_reports_no_patterns():
    db = example_sequences()
    report = mine(db, example_cfg(sigma_min=0.1, sigma_max=0.1, mode="rare"))
    assert not report.patterns(2)
    # single events are not capped from above
    assert len(report.single_events()) == len(db.events())


def test_rare_output_is_within_frequent_output():
    for _, db, _, cfg in oracle_instances(40, seed=5):
        if cfg.mode.value != "rare":
            continue
        rare = mine(db, cfg)
        freq = mine(db, replace(cfg, mode="frequent"))
        assert rare.pattern_keys(2) <= freq.pattern_keys(2)
        for r in rare.results(2):
            assert r.count <= cfg.max_count(len(db))


def test_random_instances_match_oracle_at_length_three():
    for _, db, _, cfg in oracle_instances(30, seed=11):
        assert mine(db, cfg).pattern_keys() == {r.key() for r in brute_force_mine(db, cfg)}


def test_emitted_patterns_re_verify():
    for _, db, _, cfg in oracle_instances(25, seed=3):
        report = mine(db, cfg)
        for r in report.results(2):
            ids = tuple(i for i, s in enumerate(db) if sequence_supports(s, r.pattern, cfg)[0])
            assert ids == r.sequences and r.count == len(ids)
            assert r.count >= cfg.min_count(len(db)) and cfg.confident(r.count, r.max_event_count)
            for sid, witness in zip(r.sequences, r.witnesses):
                assert all(w in db[sid].instances for w in witness)
                assert [w.event for w in witness] == list(r.pattern.events)
                for (i, j), rel in zip(pair_slots(r.pattern.k), r.pattern.relations):
                    assert classify_relation(witness[i], witness[j], cfg.epsilon, cfg.d_o) is rel


def test_pruning_counters_order_on_example():
    db = example_sequences()
    cand = {reg: mine(db, example_cfg(pruning=reg)).counters.candidates for reg in REGIMES}
    assert cand["all"] <= cand["apriori"] <= cand["none"]
    assert cand["all"] <= cand["transitivity"] <= cand["none"]


def test_level_functions_compose_to_mine():
    db = example_sequences()
    cfg = example_cfg(sigma_min=0.5, delta=0.5)
    h1 = build_hlh1(db, cfg.min_count(len(db)))
    c = Counters()
    h2 = mine_pairs(h1, db, cfg, c)
    h3 = mine_k(h2, h1, h2, db, cfg, 3, c)
    report = mine(db, cfg)
    assert set(h2.PH) >= report.patterns(2) - report.patterns(3)
    assert set(h3.PH) == {p for p in report.hlh[3].PH}
    with pytest.raises(ValueError):
        mine_k(h2, h1, h2, db, cfg, 2)


def test_max_pattern_len_stops_mining():
    db = example_sequences()
    report = mine(db, example_cfg(sigma_min=0.25, delta=0.0, max_pattern_len=2))
    assert max(report.levels) <= 2


def test_report_serialises():
    report = mine(example_sequences(), example_cfg())
    data = report.to_dict()
    assert data["n_sequences"] == 4 and data["config"]["mode"] == "frequent"
    assert "witnesses" not in report.to_dict(include_witnesses=False)["levels"]["1"][0]
    assert report.to_json().startswith("{")
    assert "support%" in report.table()


def test_approximate_on_identical_series_equals_exact():
    rng = np.random.default_rng(0)
    col = np.repeat(rng.choice(["a", "b", "c"], size=40), 3)
    db_syb = SymbolicDatabase.from_rows(np.arange(col.size), {"u": col, "v": col, "w": col})
    cfg = MiningConfig(sigma_min=0.2, delta=0.3, t_max=12, max_pattern_len=3)
    exact = mine(build_sequence_db(db_syb, 12, 0, 12), cfg)
    approx = mine_approximate(db_syb, cfg, 12, 0, 12)
    assert approx.pattern_keys() == exact.pattern_keys()
    assert accuracy(approx, exact) == 1.0
    assert approx.prune_log["pruned_pairs_pct"] == 0.0


def test_approximate_prunes_noise_and_stays_sound():
    spec = GenSpec(seed=4, n_series=12, n_timestamps=2000, alphabet_size=3, run_length=8, window=10,
                   blocks=(BlockSpec(4, 0.0),))
    db_syb, manifest = generate(spec)
    cfg = MiningConfig(sigma_min=0.2, delta=0.5, t_max=10, max_pattern_len=3)
    exact = mine(build_sequence_db(db_syb, 10, 0, 10), cfg)
    approx = mine_approximate(db_syb, cfg, 10, 0, 10)
    assert approx.pattern_keys() <= exact.pattern_keys()
    block = set(manifest["blocks"][0]["series"])
    kept = {(p["x"], p["y"]) for p in approx.prune_log["pairs"] if p["kept"]}
    assert kept and all(x in block and y in block for x, y in kept)
    assert set(approx.prune_log["pruned_series"]) == set(db_syb.series_ids) - block
    assert approx.counters.consistent()


def test_approximate_on_oracle_instances_is_subset():
    for db_syb, db, window, cfg in oracle_instances(40, seed=8):
        exact = mine(db, cfg)
        approx = mine_approximate(db_syb, cfg, window, 0, cfg.t_max)
        assert approx.pattern_keys() <= exact.pattern_keys()


def test_approximate_rejects_sequence_database():
    with pytest.raises(TypeError):
        mine_approximate(example_sequences(), example_cfg(), 45)


def test_mine_rejects_non_config():
    with pytest.raises(TypeError):
        mine(example_sequences(), {"sigma_min": 0.5})
