"""Decision-variable record of the allocation problem."""

from typing import List

from pydantic import BaseModel, ConfigDict, Field

from relaybc.core.channel import ChannelState
from relaybc.core.config import NetworkConfig


class Allocation(BaseModel):
    """One point (M, N, P0, P1, beta, eigenvalues) of the allocation problem.

    Construction only checks types; C1-C7 are audited by check_constraints so
    that infeasible points can still be represented and reported.
    """

    model_config = ConfigDict(frozen=True)

    M: int = Field(..., description="Backscatter subframes")
    N: int = Field(..., description="Relay subframes")
    P0: float = Field(..., description="HAP power in the backscatter phase, W")
    P1: float = Field(..., description="HAP power in the relay phase, W")
    beta: float = Field(..., description="Power reflection coefficient")
    eigenvalues: List[float] = Field(default_factory=list, description="Spectrum of G G^H")

    def fractions(self, cfg: NetworkConfig):
        """(M/L, N/L) with L taken from the scenario."""
        return self.M / cfg.L, self.N / cfg.L


def harvested_energy(alloc: Allocation, chan: ChannelState, cfg: NetworkConfig) -> float:
    """Energy harvested by the IoT node over the backscatter phase, J."""
    return (alloc.M / cfg.L) * cfg.Ts * cfg.eta * (1.0 - alloc.beta) * alloc.P0 * chan.g_sr
