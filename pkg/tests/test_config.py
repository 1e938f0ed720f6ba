import json
import logging

import pytest
import yaml
from pydantic import ValidationError

from relaybc.core import ConfigError, NetworkConfig, dbm_per_hz_to_w, default_config, load_config


def test_defaults_match_simulation_table(cfg):
    assert cfg.coord_s == (0.0, 0.0)
    assert cfg.coord_r == (20.0, 20.0)
    assert cfg.coord_d == (100.0, 0.0)
    assert cfg.L == 20
    assert cfg.P == 20.0
    assert cfg.energy_per_block == pytest.approx(0.2)
    assert cfg.tsw == pytest.approx(100.0)
    assert cfg.noise_bw == pytest.approx(1e-9)


def test_energy_budget_is_converted_to_power():
    cfg = NetworkConfig(E=0.2)
    assert cfg.P == pytest.approx(20.0)

    cfg = NetworkConfig(E={"joules": 0.1}, Ts=0.02, Pmax=20.0)
    assert cfg.P == pytest.approx(5.0)


def test_budget_given_twice_is_rejected():
    with pytest.raises(ValidationError):
        NetworkConfig(E=0.2, P=20.0)


def test_sigma2_units():
    assert dbm_per_hz_to_w(-100.0) == pytest.approx(1e-13)
    assert NetworkConfig(sigma2={"dbm_per_hz": -100.0}).sigma2 == pytest.approx(1e-13)
    assert NetworkConfig(sigma2={"w_per_hz": 2e-13}).sigma2 == pytest.approx(2e-13)
    with pytest.raises(ValidationError):
        NetworkConfig(sigma2={"db": 3})


@pytest.mark.parametrize(
    "changes",
    [
        {"P": 30.0, "Pmax": 20.0},
        {"L": 1},
        {"eta": 0.0},
        {"eta": 1.5},
        {"Pc": -1e-4},
        {"alpha1": 7.0},
        {"W": 0.0},
        {"coord_r": (float("nan"), 0.0)},
    ],
)
def test_invalid_scenarios_are_rejected(changes):
    with pytest.raises(ValidationError):
        NetworkConfig(**changes)


def test_lossless_circuit_and_unit_gain_limits_are_allowed():
    cfg = NetworkConfig(Pc=0.0, alpha1=0.0, alpha2=0.0, alpha3=0.0)
    assert cfg.Pc == 0.0


def test_small_exponent_logs_warning(caplog):
    with caplog.at_level(logging.WARNING, logger="relaybc.core.config"):
        NetworkConfig(alpha1=0.5)
    assert "below free-space" in caplog.text


def test_config_is_immutable(cfg):
    with pytest.raises(ValidationError):
        cfg.L = 40


def test_with_updates_revalidates(cfg):
    longer = cfg.with_updates(L=40)
    assert longer.L == 40
    assert cfg.L == 20
    with pytest.raises(ValidationError):
        cfg.with_updates(P=50.0)


def test_table_i_overrides():
    assert default_config(alpha1=2.5).alpha1 == 2.5


def test_load_yaml_and_json(tmp_path, cfg):
    data = cfg.model_dump(mode="json")
    data["alpha1"] = 3.4

    yaml_path = tmp_path / "scenario.yaml"
    yaml_path.write_text(yaml.dump(data))
    assert load_config(str(yaml_path)).alpha1 == 3.4

    json_path = tmp_path / "scenario.json"
    json_path.write_text(json.dumps(data))
    assert load_config(str(json_path)) == load_config(str(yaml_path))


def test_load_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "missing.yaml"))

    odd = tmp_path / "scenario.txt"
    odd.write_text("L: 20")
    with pytest.raises(ConfigError):
        load_config(str(odd))

    bad = tmp_path / "bad.yaml"
    bad.write_text("L: 1\n")
    with pytest.raises(ConfigError):
        load_config(str(bad))

    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("42\n")
    with pytest.raises(ConfigError):
        load_config(str(scalar))
