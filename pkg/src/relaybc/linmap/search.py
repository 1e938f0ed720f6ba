"""Grid search over eigenvalue profiles on the simplex {lambda >= 0, sum = N}."""

import logging
import math
from typing import Iterator, Tuple

import numpy as np

from relaybc.core.channel import ChannelState
from relaybc.core.config import NetworkConfig
from relaybc.core.errors import SearchSpaceError
from relaybc.linmap.mapping import EigenProfile, relay_gain_rate
from relaybc.throughput.rates import link_snrs

logger = logging.getLogger(__name__)

MAX_PROFILE_DIM = 4
MAX_GRID_POINTS = 5_000_000


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Compositions of total into parts nonnegative integers, lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def brute_force_eigen_search(
    M: int,
    N: int,
    beta: float,
    P0: float,
    P1: float,
    chan: ChannelState,
    cfg: NetworkConfig,
    grid_step: float,
) -> Tuple[EigenProfile, float]:
    """Maximise R_D2 over a grid of eigenvalue profiles.

    Args:
        M, N: Subframe split; the profile has min(M, N) entries.
        beta, P0, P1: Operating point defining gamma_SD and gamma_RD.
        grid_step: Spacing of the simplex grid in eigenvalue units.

    Returns:
        The maximising profile (first in lexicographic order on ties) and its R_D2.
    """
    k = min(M, N)
    if k > MAX_PROFILE_DIM:
        raise SearchSpaceError(f"profile dimension {k} exceeds the guard of {MAX_PROFILE_DIM}")
    if k < 1:
        return EigenProfile(values=[]), 0.0

    steps = max(1, int(round(N / grid_step)))
    count = math.comb(steps + k - 1, k - 1)
    if count > MAX_GRID_POINTS:
        raise SearchSpaceError(f"simplex grid would hold {count} points")

    grid = np.array(list(_compositions(steps, k)), dtype=float) * (N / steps)
    gamma_sd, _, gamma_rd = link_snrs(beta, P0, P1, chan)
    values = relay_gain_rate(grid, gamma_sd, gamma_rd, cfg.tsw, cfg.L)
    best = int(np.argmax(values))
    logger.debug(f"searched {count} profiles for k={k}, best index {best}")
    return EigenProfile(values=grid[best].tolist()), float(values[best])
