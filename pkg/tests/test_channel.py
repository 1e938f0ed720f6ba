import math

import pytest

from relaybc.core import (
    Allocation,
    DegenerateGeometryError,
    channel_gains,
    default_config,
    feasibility_constants,
    harvested_energy,
    min_backscatter_power,
    path_gain,
)


def test_path_gain():
    assert path_gain(2.0, 2.0) == pytest.approx(0.25)
    assert path_gain(10.0, 3.0, xi=0.5) == pytest.approx(5e-4)
    with pytest.raises(DegenerateGeometryError):
        path_gain(0.0, 2.0)


def test_default_gains(chan):
    assert chan.g_sd == pytest.approx(1e-6)
    assert chan.g_sr == pytest.approx(math.sqrt(800.0) ** -2.7)
    assert chan.g_rd == pytest.approx(math.sqrt(6800.0) ** -2.7)
    assert chan.noise_bw == pytest.approx(1e-9)
    assert not chan.direct_dominant


def test_direct_dominant_geometry(direct_cfg):
    chan = channel_gains(direct_cfg)
    assert chan.g_sd == pytest.approx(50.0 ** -2.5)
    assert chan.direct_dominant


def test_colocated_nodes_are_degenerate():
    with pytest.raises(DegenerateGeometryError):
        channel_gains(default_config(coord_r=(0.0, 0.0)))


def test_feasibility_constants(cfg, chan):
    fc = feasibility_constants(chan, cfg)
    scale = cfg.Pc / (cfg.eta * cfg.noise_bw)
    assert fc.A == pytest.approx(1.0 - scale * chan.g_sr)
    assert fc.B == pytest.approx(1.0 - scale * chan.g_sd)
    # A is negative in the default scenario; only A + k_sr*P0 has to be positive
    assert fc.A < 0.0


def test_min_backscatter_power(cfg, chan):
    p0_min = min_backscatter_power(chan, cfg)
    assert p0_min == pytest.approx(3.32, rel=1e-2)
    assert min_backscatter_power(chan, cfg.with_updates(Pc=0.0)) == 0.0


def test_harvested_energy_covers_circuit_at_threshold(cfg, chan):
    p0_min = min_backscatter_power(chan, cfg)
    alloc = Allocation(M=10, N=10, P0=p0_min, P1=0.0, beta=0.0)
    assert harvested_energy(alloc, chan, cfg) == pytest.approx(0.5 * cfg.Ts * cfg.Pc)
