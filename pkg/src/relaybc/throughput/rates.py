"""Closed-form rates of the backscatter/relay block, in bits per block."""

import logging
from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field

from relaybc.core.allocation import Allocation
from relaybc.core.channel import ChannelState
from relaybc.core.config import NetworkConfig

logger = logging.getLogger(__name__)

RELAY_IDLE_FLAG = "relay-idle-no-backscatter"


class ThroughputRegime(str, Enum):
    """Which term attains r_sum = max(r_sd, min(r_sr, r_relay))."""

    SD_DOMINANT = "SD-dominant"
    RELAY_LIMITED = "relay-limited"
    DESTINATION_LIMITED = "destination-limited"


class BoundCase(str, Enum):
    """Ordering of R_SR against R'_D and its upper bound R_D0."""

    CASE_I = "i"  # R_SR >= R_D0
    CASE_II = "ii"  # R_SR < R'_D
    CASE_III = "iii"  # R'_D <= R_SR < R_D0


class RateBreakdown(BaseModel):
    """All link rates of one allocation."""

    r_sd: float = Field(..., description="Direct S-D rate, bits/block")
    r_sr: float = Field(..., description="S-R decoding rate, bits/block")
    r_relay: float = Field(..., description="Combined rate at D, bits/block")
    r_relay_upper: float = Field(..., description="R_SD + R_RD, bits/block")
    r_sum: float = Field(..., description="Achievable throughput, bits/block")
    gamma_sd: float
    gamma_sr: float
    gamma_rd: float
    case_label: ThroughputRegime
    flags: List[str] = Field(default_factory=list)

    def as_row(self) -> dict:
        """Flat mapping for CSV assembly."""
        row = self.model_dump(exclude={"flags"})
        row["case_label"] = self.case_label.value
        row["flags"] = ";".join(self.flags)
        return row


class CaseClassification(BaseModel):
    case: BoundCase
    relation: str = Field(..., description="Relation of R_sum0 to R_sum: '>=' or '='")


def link_snrs(
    beta: float, P0: float, P1: float, chan: ChannelState
) -> Tuple[float, float, float]:
    """(gamma_SD, gamma_SR, gamma_RD) for the given powers and PRC."""
    backscatter = beta * P0 * chan.g_sr
    return (
        backscatter * chan.g_sd / chan.noise_bw,
        backscatter * chan.g_sr / chan.noise_bw,
        P1 * chan.g_rd / chan.noise_bw,
    )


def _log2_1p(x: float) -> float:
    return float(np.log1p(x) / np.log(2.0))


def rate_sd(alloc: Allocation, chan: ChannelState, cfg: NetworkConfig) -> float:
    gamma_sd, _, _ = link_snrs(alloc.beta, alloc.P0, alloc.P1, chan)
    return (alloc.M / cfg.L) * cfg.tsw * _log2_1p(gamma_sd)


def rate_sr(alloc: Allocation, chan: ChannelState, cfg: NetworkConfig) -> float:
    _, gamma_sr, _ = link_snrs(alloc.beta, alloc.P0, alloc.P1, chan)
    return (alloc.M / cfg.L) * cfg.tsw * _log2_1p(gamma_sr)


def _relay_rate(
    alloc: Allocation, chan: ChannelState, cfg: NetworkConfig
) -> Tuple[float, List[str]]:
    gamma_sd, _, gamma_rd = link_snrs(alloc.beta, alloc.P0, alloc.P1, chan)
    M, N, L = alloc.M, alloc.N, cfg.L
    if M >= N:
        rate = (N / L) * _log2_1p(gamma_sd + gamma_rd) + ((M - N) / L) * _log2_1p(gamma_sd)
        return cfg.tsw * rate, []
    if M == 0:
        return 0.0, [RELAY_IDLE_FLAG]
    return cfg.tsw * (M / L) * _log2_1p(gamma_sd + N * gamma_rd / M), []


def rate_relay_combined(alloc: Allocation, chan: ChannelState, cfg: NetworkConfig) -> float:
    """R'_D with the uniform eigenvalue profile; zero when M = 0."""
    return _relay_rate(alloc, chan, cfg)[0]


def _relay_upper(alloc: Allocation, chan: ChannelState, cfg: NetworkConfig) -> float:
    _, _, gamma_rd = link_snrs(alloc.beta, alloc.P0, alloc.P1, chan)
    return rate_sd(alloc, chan, cfg) + (alloc.N / cfg.L) * cfg.tsw * _log2_1p(gamma_rd)


def rate_sum(alloc: Allocation, chan: ChannelState, cfg: NetworkConfig) -> RateBreakdown:
    gamma_sd, gamma_sr, gamma_rd = link_snrs(alloc.beta, alloc.P0, alloc.P1, chan)
    r_sd = rate_sd(alloc, chan, cfg)
    r_sr = rate_sr(alloc, chan, cfg)
    r_relay, flags = _relay_rate(alloc, chan, cfg)
    relay_path = min(r_sr, r_relay)
    r_sum = max(r_sd, relay_path)

    if r_sd >= relay_path:
        regime = ThroughputRegime.SD_DOMINANT
    elif r_sr <= r_relay:
        regime = ThroughputRegime.RELAY_LIMITED
    else:
        regime = ThroughputRegime.DESTINATION_LIMITED

    return RateBreakdown(
        r_sd=r_sd,
        r_sr=r_sr,
        r_relay=r_relay,
        r_relay_upper=_relay_upper(alloc, chan, cfg),
        r_sum=r_sum,
        gamma_sd=gamma_sd,
        gamma_sr=gamma_sr,
        gamma_rd=gamma_rd,
        case_label=regime,
        flags=flags,
    )


def rate_sum_upper(alloc: Allocation, chan: ChannelState, cfg: NetworkConfig) -> float:
    """R_sum0, the throughput with R'_D replaced by R_SD + R_RD."""
    r_sd = rate_sd(alloc, chan, cfg)
    return max(r_sd, min(rate_sr(alloc, chan, cfg), _relay_upper(alloc, chan, cfg)))


def equal_time_reference(
    chan: ChannelState, cfg: NetworkConfig, beta: float, P0: float, P1: float
) -> float:
    """Throughput of the equal-time (M = N) decode-and-forward scheme."""
    gamma_sd, gamma_sr, gamma_rd = link_snrs(beta, P0, P1, chan)
    return (cfg.tsw / 2.0) * _log2_1p(max(gamma_sd, min(gamma_sr, gamma_sd + gamma_rd)))


def classify_case(breakdown: RateBreakdown) -> CaseClassification:
    if breakdown.r_sr >= breakdown.r_relay_upper:
        return CaseClassification(case=BoundCase.CASE_I, relation=">=")
    if breakdown.r_sr < breakdown.r_relay:
        return CaseClassification(case=BoundCase.CASE_II, relation="=")
    return CaseClassification(case=BoundCase.CASE_III, relation=">=")
