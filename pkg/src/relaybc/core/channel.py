"""Large-scale channel gains and the circuit-power feasibility constants."""

import logging
import math

from pydantic import BaseModel, ConfigDict, Field

from relaybc.core.config import Coordinate, NetworkConfig
from relaybc.core.errors import DegenerateGeometryError

logger = logging.getLogger(__name__)


class ChannelState(BaseModel):
    """Link power gains |h|^2 and the band noise power."""

    model_config = ConfigDict(frozen=True)

    g_sd: float = Field(..., gt=0.0, description="|h_SD|^2")
    g_sr: float = Field(..., gt=0.0, description="|h_SR|^2")
    g_rd: float = Field(..., gt=0.0, description="|h_RD|^2")
    noise_bw: float = Field(..., gt=0.0, description="W * sigma2, W")

    @property
    def direct_dominant(self) -> bool:
        """True when the S-D link is stronger than S-R (the second solver case)."""
        return self.g_sd > self.g_sr


class FeasibilityConstants(BaseModel):
    """A and B of the reparameterised rates; may be negative."""

    model_config = ConfigDict(frozen=True)

    A: float
    B: float


def path_gain(distance: float, alpha: float, xi: float = 1.0) -> float:
    """xi * d^-alpha for a strictly positive distance."""
    if distance <= 0.0:
        raise DegenerateGeometryError(f"link distance must be positive, got {distance}")
    return xi * distance ** (-alpha)


def _distance(a: Coordinate, b: Coordinate) -> float:
    return math.dist(a, b)


def channel_gains(cfg: NetworkConfig) -> ChannelState:
    """Evaluate the three link gains from the scenario geometry."""
    links = {
        "S-D": (_distance(cfg.coord_s, cfg.coord_d), cfg.alpha1, cfg.xi_sd),
        "S-R": (_distance(cfg.coord_s, cfg.coord_r), cfg.alpha2, cfg.xi_sr),
        "R-D": (_distance(cfg.coord_r, cfg.coord_d), cfg.alpha3, cfg.xi_rd),
    }
    gains = {}
    for name, (d, alpha, xi) in links.items():
        if d == 0.0:
            raise DegenerateGeometryError(f"nodes of link {name} share a coordinate")
        gains[name] = path_gain(d, alpha, xi)

    chan = ChannelState(
        g_sd=gains["S-D"], g_sr=gains["S-R"], g_rd=gains["R-D"], noise_bw=cfg.noise_bw
    )
    logger.debug(f"channel gains: {chan}")
    return chan


def feasibility_constants(chan: ChannelState, cfg: NetworkConfig) -> FeasibilityConstants:
    scale = cfg.Pc / (cfg.eta * chan.noise_bw)
    return FeasibilityConstants(A=1.0 - scale * chan.g_sr, B=1.0 - scale * chan.g_sd)


def min_backscatter_power(chan: ChannelState, cfg: NetworkConfig) -> float:
    """Smallest P0 meeting the circuit-power requirement, Pc/(eta*g_sr)."""
    return cfg.Pc / (cfg.eta * chan.g_sr)
