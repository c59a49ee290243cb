"""Flat key = value config parsing and parameter loading."""

import math

import pytest

from qubus.config import (
    ConfigError,
    RunConfig,
    chain_params,
    link_params,
    load_config,
    parse_config,
    qnd_params,
    source_state,
)


def test_defaults_hit_the_operating_point():
    cfg = RunConfig()
    lp = link_params(cfg)
    assert lp.eta == pytest.approx(math.exp(-3.0), rel=1e-15)
    assert abs(cfg.alpha * cfg.theta) ** 2 == pytest.approx(1e-3, rel=1e-15)
    q = qnd_params(cfg)
    assert abs(q.alpha0 * q.theta) == pytest.approx(2 * math.sqrt(5), rel=1e-12)
    assert source_state(cfg).p_s == 0.5
    cp = chain_params(cfg)
    assert cp.n_levels == 4


def test_parse_tracks_provided_keys():
    cfg = parse_config("# comment\nL0_km = 50\n\ntheta = 0.02  # trailing\n")
    assert cfg.L0_km == 50.0
    assert cfg.theta == 0.02
    assert cfg.was_provided("L0_km")
    assert cfg.was_provided("theta")
    assert not cfg.was_provided("f_hz")
    assert cfg.f_hz == 40e3


def test_parse_rejects_unknown_and_duplicate_keys():
    with pytest.raises(ConfigError):
        parse_config("alpha = 1\nbogus = 2\n")
    with pytest.raises(ConfigError):
        parse_config("alpha = 1\nalpha = 2\n")


def test_parse_rejects_bad_values_and_shapes():
    with pytest.raises(ConfigError):
        parse_config("alpha = banana\n")
    with pytest.raises(ConfigError):
        parse_config("seed = 1.5\n")
    with pytest.raises(ConfigError):
        parse_config("just a line\n")


def test_load_config_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/path.cfg")
    assert load_config(None) == RunConfig()


def test_overrides_flow_into_params():
    cfg = parse_config("f_hz = 1e6\nP_c = 1\n")
    cp = chain_params(cfg, L_km=300.0)
    assert cp.f_hz == 1e6
    assert cp.P_c == 1.0
    assert cp.L_km == 300.0
