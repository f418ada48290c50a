import pytest

from boxdecoherence.config import SimConfig, load_config, parse_config_text, parse_overrides
from boxdecoherence.errors import ConfigError


def test_defaults_are_paper_values():
    cfg = load_config()
    assert (cfg.L, cfg.hbar, cfg.m, cfg.p0, cfg.q0, cfg.sigma, cfg.t) == (1.0, 1.0, 1.0, 30.0, 0.5, 0.05, 0.5)
    assert cfg.d == 0.01 and cfg.n_points == 2048


def test_file_then_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment line\n\nd = 0.02   # trailing comment\nn_points = 512\nt=0.25\n")
    cfg = load_config(path, {"t": "0"})
    assert cfg.d == 0.02 and cfg.n_points == 512 and cfg.t == 0.0
    assert isinstance(cfg.n_points, int)


def test_parse_error_carries_line_number():
    with pytest.raises(ConfigError, match=r"cfg:3:"):
        parse_config_text("d = 0.1\n# ok\nthis line is bad\n", "cfg")
    with pytest.raises(ConfigError, match=r"cfg:1:.*n_points"):
        parse_config_text("n_points = 12.5\n", "cfg")


def test_unknown_key():
    with pytest.raises(ConfigError, match="unknown key 'bogus'"):
        parse_config_text("bogus = 1\n")
    with pytest.raises(ConfigError, match="unknown key"):
        parse_overrides(["nope=3"])


@pytest.mark.parametrize(
    "override, field",
    [
        ({"sigma": "-1"}, "sigma"),
        ({"n_points": "7"}, "n_points"),
        ({"q0": "1.5"}, "q0"),
        ({"d": "0"}, "d"),
        ({"weight_cutoff": "1.5"}, "weight_cutoff"),
        ({"n_points": "8192"}, "n_points"),
    ],
)
def test_invariant_violation_names_field(override, field):
    with pytest.raises(ConfigError, match=field):
        load_config(overrides=override)


def test_memory_cap_message():
    with pytest.raises(ConfigError, match="MiB"):
        SimConfig(n_points=5000)
    assert SimConfig(n_points=5000, max_points=5000).n_points == 5000


def test_bool_parsing():
    assert parse_config_text("no_decoherence = yes\nreversal_check = 0\n") == {
        "no_decoherence": True,
        "reversal_check": False,
    }
    with pytest.raises(ConfigError):
        parse_config_text("no_decoherence = maybe\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.cfg")
