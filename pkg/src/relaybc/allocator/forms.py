"""
Reparameterised rate expressions shared by the continuous and discrete solvers.

With the optimal PRC substituted, 1 + gamma_SR = A + k_sr*P0, 1 + gamma_SD = B + k_sd*P0
and gamma_RD = k_rd*P1, where k_sr = g_sr^2/nb, k_sd = g_sr*g_sd/nb and k_rd = g_rd/nb.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.special import xlogy

from relaybc.core.channel import (
    ChannelState,
    feasibility_constants,
    min_backscatter_power,
)
from relaybc.core.config import NetworkConfig

logger = logging.getLogger(__name__)

LOG_FLOOR = 1e-12
LN2 = float(np.log(2.0))
LOG_FLOOR_FLAG = "log-floor-active"


@dataclass(frozen=True)
class LinkConstants:
    """Per-scenario constants of the reparameterised rates."""

    A: float
    B: float
    k_sr: float
    k_sd: float
    k_rd: float
    p0_min: float
    tsw: float

    @classmethod
    def build(cls, chan: ChannelState, cfg: NetworkConfig) -> "LinkConstants":
        fc = feasibility_constants(chan, cfg)
        nb = chan.noise_bw
        return cls(
            A=fc.A,
            B=fc.B,
            k_sr=chan.g_sr**2 / nb,
            k_sd=chan.g_sr * chan.g_sd / nb,
            k_rd=chan.g_rd / nb,
            p0_min=min_backscatter_power(chan, cfg),
            tsw=cfg.tsw,
        )


def safe_log2(x):
    """log2 with arguments floored at LOG_FLOOR."""
    return np.log2(np.maximum(x, LOG_FLOOR))


def persp(tau, z):
    """tau * log2(z / tau), the perspective of log2; zero at tau = 0."""
    z = np.maximum(z, LOG_FLOOR)
    return (xlogy(tau, z) - xlogy(tau, tau)) / LN2


def persp_partials(tau, z) -> Tuple[np.ndarray, np.ndarray]:
    """(d/dtau, d/dz) of persp, with tau and z floored to keep them finite."""
    tau = np.maximum(tau, LOG_FLOOR)
    z = np.maximum(z, LOG_FLOOR)
    return (np.log(z / tau) - 1.0) / LN2, tau / (z * LN2)


@dataclass(frozen=True)
class ContinuousRates:
    """Time-shared rates at split rho, bits/block."""

    r_sd: float
    r_sr: float
    r_d: float
    floored: bool = False

    @property
    def t(self) -> float:
        """min(R_SR, R_D), the auxiliary objective."""
        return min(self.r_sr, self.r_d)


def continuous_rates(
    rho: float, P0: float, P1: float, chan: ChannelState, cfg: NetworkConfig
) -> ContinuousRates:
    """Rates with rho = M/L allowed to be fractional and beta at its optimum.

    R_D uses the M >= N form for rho >= 1/2 and the M < N form below.
    """
    k = LinkConstants.build(chan, cfg)
    sr_arg = k.A + k.k_sr * P0
    sd_arg = k.B + k.k_sd * P0
    if rho >= 0.5:
        both_arg = sd_arg + k.k_rd * P1
        r_d = (1.0 - rho) * safe_log2(both_arg) + (2.0 * rho - 1.0) * safe_log2(sd_arg)
    else:
        both_arg = sd_arg + (1.0 - rho) / rho * k.k_rd * P1
        r_d = rho * safe_log2(both_arg)

    floored = min(sr_arg, sd_arg, both_arg) < LOG_FLOOR
    if floored:
        logger.warning(f"log argument floored at rho={rho:.6g}, P0={P0:.6g}, P1={P1:.6g}")
    return ContinuousRates(
        r_sd=float(k.tsw * rho * safe_log2(sd_arg)),
        r_sr=float(k.tsw * rho * safe_log2(sr_arg)),
        r_d=float(k.tsw * r_d),
        floored=floored,
    )


def fill_budget(
    rho: float, P0: float, P1: float, cfg: NetworkConfig, p0_min: float
) -> Tuple[float, float]:
    """Project (P0, P1) into the peak limits and push them onto the budget face.

    Over budget, P1 is trimmed first. Under budget, the room goes to P1 and then to P0.
    Rates are nondecreasing in both powers, so t never drops.
    """
    P0 = float(np.clip(P0, p0_min, cfg.Pmax))
    P1 = float(np.clip(P1, 0.0, cfg.Pmax))
    relay_share = 1.0 - rho

    used = rho * P0 + relay_share * P1
    if used > cfg.P:
        if relay_share > 0.0:
            P1 = max(0.0, (cfg.P - rho * P0) / relay_share)
        if rho * P0 > cfg.P and rho > 0.0:
            P0 = cfg.P / rho
        return P0, P1

    room = cfg.P - used
    if relay_share > 0.0 and room > 0.0:
        P1_new = min(cfg.Pmax, P1 + room / relay_share)
        room -= relay_share * (P1_new - P1)
        P1 = P1_new
    if rho > 0.0 and room > 0.0:
        P0 = min(cfg.Pmax, P0 + room / rho)
    return P0, P1
