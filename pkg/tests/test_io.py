import pytest

from tpmine.io import ConfigError, RunConfig, load_symbolic_database, parse_alphabet, read_flat_config, read_wide_csv
from tpmine.transform import IngestionError


def _write(tmp_path, text, name="x.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_flat_config(tmp_path):
    p = _write(tmp_path, "a = 1  # trailing\n\n# only comment\nb=two\n", "c.cfg")
    assert read_flat_config(p) == {"a": "1", "b": "two"}
    with pytest.raises(ConfigError):
        read_flat_config(_write(tmp_path, "a = 1\na = 2\n", "d.cfg"))
    with pytest.raises(ConfigError):
        read_flat_config(_write(tmp_path, "novalue\n", "e.cfg"))


@pytest.mark.parametrize("text, where", [
    ("", "empty"),
    ("time,a\n0,1\n", ":1:"),
    ("timestamp,a\n0,1\n1\n", ":3:"),
    ("timestamp,a\n0,1\n0,2\n", ":3:"),
    ("timestamp,a\n0,1\n5,2\n7,1\n", ":4:"),
    ("timestamp,a\n0,\n", ":2:"),
    ("timestamp,a\nzero,1\n", ":2:"),
])
def test_csv_errors_name_the_row(tmp_path, text, where):
    with pytest.raises(IngestionError, match=where):
        read_wide_csv(_write(tmp_path, text))


def test_numeric_and_symbolic_columns(tmp_path):
    p = _write(tmp_path, "timestamp,temp,state\n0,1.0,on\n5,2.0,off\n10,3.0,on\n")
    db = load_symbolic_database(p, RunConfig(alphabets={"temp": "Low,High @ 1.5"}))
    assert list(db["temp"].symbols) == ["Low", "High", "High"]
    assert db["state"].alphabet == ("off", "on")
    assert db.period == 5


def test_alphabet_forms():
    assert len(parse_alphabet("quantile:4").symbols) == 4
    assert parse_alphabet("Off,On @ 0.5").thresholds == (0.5,)
    with pytest.raises(ConfigError):
        parse_alphabet("Off,On")


def test_run_config_overrides_and_validation():
    base = RunConfig.from_items({"sigma_min": "0.3", "alphabet.S": "Off,On @ 0.5"})
    cfg = RunConfig.from_items({"sigma_max": "none", "mode": "rare"}, base=base)
    assert cfg.sigma_min == 0.3 and cfg.sigma_max is None and cfg.alphabets == {"S": "Off,On @ 0.5"}
    for bad in ({"method": "fast"}, {"mode": "sometimes"}, {"window": "ten"}, {"delta": "1.5"}):
        with pytest.raises(ConfigError):
            RunConfig.from_items(bad)
