import numpy as np
import pytest

from relaybc.allocator import optimal_beta
from relaybc.core import Allocation, channel_gains, default_config, min_backscatter_power
from relaybc.linmap import optimal_eigenvalues


@pytest.fixture(autouse=True)
def _clean_solver_env(monkeypatch):
    """Keep RELAYBC_* variables from the calling shell out of SolverOptions."""
    import os

    for key in list(os.environ):
        if key.startswith("RELAYBC_"):
            monkeypatch.delenv(key)


@pytest.fixture
def cfg():
    return default_config()


@pytest.fixture
def chan(cfg):
    return channel_gains(cfg)


@pytest.fixture
def direct_cfg():
    """Geometry where S-D is stronger than S-R."""
    return default_config(alpha1=2.5, alpha2=3.2, coord_d=(50.0, 0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def draw_allocation(cfg, chan, rng):
    """Random allocation meeting C1-C7 for the default scenario."""

    def draw(M=None):
        M = int(rng.integers(1, cfg.L)) if M is None else M
        N = cfg.L - M
        p0_min = min_backscatter_power(chan, cfg)
        P0 = float(rng.uniform(p0_min, cfg.Pmax))
        room = max(cfg.P - (M / cfg.L) * P0, 0.0)
        P1 = float(min(cfg.Pmax, rng.uniform(0.0, 1.0) * room * cfg.L / max(N, 1))) if N else 0.0
        return Allocation(
            M=M,
            N=N,
            P0=P0,
            P1=P1,
            beta=optimal_beta(P0, chan, cfg),
            eigenvalues=optimal_eigenvalues(M, N).values,
        )

    return draw
