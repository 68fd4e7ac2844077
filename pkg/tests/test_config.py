"""Run configuration: parsing, validation, canonical echo."""

import pytest

from sbpflow.config import (ConfigError, RunConfig, config_from_pairs,
                            format_config, load_config, parse_config_text)


FULL = """
# comment line
grid.nx = 21
grid.ny = 17          # trailing comment
grid.x0 = -1.0
grid.x1 = 3.0
grid.y0 = 0.5
grid.y1 = 2.5
sbp.order = 4
fluids.rho_l = 800.0
fluids.rho_g = 1.2
fluids.mu_l = 1e-3
fluids.mu_g = 1e-5
time.dt_mode = fixed
time.dt = 1e-4
time.t_end = 0.25
time.max_steps = 50
output.dir = /tmp/somewhere
output.snapshot_every = 10
run.assert_mode = true
run.assert_tol = 1e-10
run.project = false
run.kappa = 0.5
scenario.name = shear-channel
scenario.u_max = 0.75
scenario.profile = parabolic
bc.west.kind = auto
bc.west.data = zero
"""


def test_defaults():
    cfg = RunConfig()
    assert cfg.order == 2
    assert cfg.grid.nx == 33
    assert cfg.fluids.rho_l == 1000.0
    assert cfg.time.dt_mode == "cfl"
    assert cfg.run.assert_mode is False
    assert cfg.run.project is True
    assert cfg.run.sigma1 == -0.5
    assert cfg.scenario_name == "quiescent-box"
    assert cfg.bc_overrides == {}


def test_full_parse():
    cfg = config_from_pairs(parse_config_text(FULL))
    assert cfg.grid.nx == 21 and cfg.grid.ny == 17
    assert cfg.grid.x0 == -1.0 and cfg.grid.y1 == 2.5
    assert cfg.order == 4
    assert cfg.fluids.rho_l == 800.0 and cfg.fluids.mu_g == 1e-5
    assert cfg.time.dt_mode == "fixed" and cfg.time.dt == 1e-4
    assert cfg.time.max_steps == 50
    assert cfg.output.dir == "/tmp/somewhere"
    assert cfg.output.snapshot_every == 10
    assert cfg.run.assert_mode is True
    assert cfg.run.assert_tol == 1e-10
    assert cfg.run.project is False
    assert cfg.run.kappa == 0.5
    assert cfg.scenario_name == "shear-channel"
    assert cfg.scenario_params == {"u_max": "0.75", "profile": "parabolic"}
    assert cfg.bc_overrides["west"].kind == "auto"
    assert cfg.bc_overrides["west"].data == "zero"


def test_parse_rejects_malformed_lines():
    with pytest.raises(ConfigError, match="expected 'key = value'"):
        parse_config_text("grid.nx 33")
    with pytest.raises(ConfigError, match="empty key or value"):
        parse_config_text("grid.nx =")
    with pytest.raises(ConfigError, match="duplicate key"):
        parse_config_text("grid.nx = 3\ngrid.nx = 5")


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        config_from_pairs({"grid.nz": "3"})
    with pytest.raises(ConfigError, match="unknown key"):
        config_from_pairs({"bc.top.kind": "wall"})
    with pytest.raises(ConfigError, match="unknown key"):
        config_from_pairs({"bc.west.flavor": "wall"})


def test_type_errors_reported_with_key():
    with pytest.raises(ConfigError, match="grid.nx"):
        config_from_pairs({"grid.nx": "many"})
    with pytest.raises(ConfigError, match="run.assert_mode"):
        config_from_pairs({"run.assert_mode": "maybe"})
    with pytest.raises(ConfigError, match="fluids.rho_l"):
        config_from_pairs({"fluids.rho_l": "heavy"})


def test_bool_spellings():
    for val, expect in (("true", True), ("1", True), ("yes", True),
                        ("false", False), ("0", False), ("no", False)):
        cfg = config_from_pairs({"run.assert_mode": val})
        assert cfg.run.assert_mode is expect


def test_bc_values_validated():
    with pytest.raises(ConfigError, match="kind"):
        config_from_pairs({"bc.west.kind": "slip"})
    with pytest.raises(ConfigError, match="data"):
        config_from_pairs({"bc.west.data": "ramp"})


@pytest.mark.parametrize("pairs,match", [
    ({"sbp.order": "3"}, "sbp.order"),
    ({"grid.nx": "1"}, "at least 2"),
    ({"grid.x1": "-2.0"}, "extents"),
    ({"fluids.rho_g": "0"}, "positive"),
    ({"fluids.mu_l": "-1e-3"}, "nonnegative"),
    ({"time.dt_mode": "euler"}, "dt_mode"),
    ({"time.rk_scheme": "rk2"}, "rk_scheme"),
    ({"time.dt_mode": "fixed"}, "time.dt"),
    ({"time.cfl": "2.5"}, "cfl"),
    ({"time.t_end": "-0.1"}, "t_end"),
    ({"time.max_steps": "0"}, "max_steps"),
    ({"output.snapshot_every": "-1"}, "snapshot_every"),
    ({"run.assert_tol": "0"}, "assert_tol"),
    ({"run.sigma0": "0.4"}, "sigma0"),
    ({"run.kappa": "-0.5"}, "kappa"),
])
def test_validation_rules(pairs, match):
    with pytest.raises(ConfigError, match=match):
        config_from_pairs(pairs)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "absent.cfg"))


def test_format_config_round_trips(tmp_path):
    cfg = config_from_pairs(parse_config_text(FULL))
    echo = format_config(cfg)
    again = config_from_pairs(parse_config_text(echo))
    assert format_config(again) == echo
    # canonical echo is sorted and newline terminated
    lines = echo.strip().splitlines()
    assert lines == sorted(lines)
    assert echo.endswith("\n")
    assert "bc.west.kind = auto" in lines
    assert "scenario.u_max = 0.75" in lines


def test_format_config_defaults_parse_back():
    echo = format_config(RunConfig())
    cfg = config_from_pairs(parse_config_text(echo))
    assert cfg == RunConfig()
