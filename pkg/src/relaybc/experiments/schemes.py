"""Proposed scheme and the baselines it is compared against."""

import logging
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from relaybc.allocator import (
    ScaStep,
    SolverOptions,
    allocate,
    optimal_beta,
    reoptimize_powers,
)
from relaybc.allocator.forms import LinkConstants, safe_log2
from relaybc.core.allocation import Allocation
from relaybc.core.channel import ChannelState
from relaybc.core.config import NetworkConfig
from relaybc.core.errors import AllocationInfeasibleError, InfeasibleStage
from relaybc.kernel import maximize_unimodal
from relaybc.linmap import optimal_eigenvalues
from relaybc.oracle import exhaustive_allocate
from relaybc.throughput import rate_sum

logger = logging.getLogger(__name__)


class SchemeId(str, Enum):
    """Schemes a sweep can evaluate."""

    PROPOSED = "proposed"
    BC_ONLY = "bc-only"
    RELAY_BC_FIXED = "relay-bc-fixed"
    OPPORTUNISTIC = "opportunistic-relay-bc"
    RELATED_UPPER = "related-continuous-upper"
    EXHAUSTIVE = "exhaustive"


class SchemeResult(BaseModel):
    """Throughput of one scheme on one scenario."""

    scheme: SchemeId
    throughput: float = Field(..., description="bits/block")
    allocation: Optional[Allocation] = None
    case: Optional[str] = None
    rule: Optional[str] = None
    iterations: int = 0
    rho: Optional[float] = None
    P0: Optional[float] = None
    P1: Optional[float] = None
    note: str = ""
    sca_trace: List[ScaStep] = Field(default_factory=list)

    @property
    def discrete(self) -> bool:
        """True when the result carries an integer allocation."""
        return self.allocation is not None


def _from_allocation(
    scheme: SchemeId,
    alloc: Allocation,
    chan: ChannelState,
    cfg: NetworkConfig,
    note: str = "",
) -> SchemeResult:
    return SchemeResult(
        scheme=scheme,
        throughput=rate_sum(alloc, chan, cfg).r_sum,
        allocation=alloc,
        rho=alloc.M / cfg.L,
        P0=alloc.P0,
        P1=alloc.P1,
        note=note,
    )


def _bc_only(chan: ChannelState, cfg: NetworkConfig) -> SchemeResult:
    """All subframes backscatter straight to D with P0 = P."""
    alloc = Allocation(
        M=cfg.L, N=0, P0=cfg.P, P1=0.0, beta=optimal_beta(cfg.P, chan, cfg), eigenvalues=[]
    )
    return _from_allocation(SchemeId.BC_ONLY, alloc, chan, cfg)


def _relay_fixed(chan: ChannelState, cfg: NetworkConfig, opts: SolverOptions) -> SchemeResult:
    """Equal-time split M = floor(L/2) with powers re-optimised for that split."""
    M = cfg.L // 2
    N = cfg.L - M
    P0, P1, beta = reoptimize_powers(M, N, chan, cfg, opts)
    alloc = Allocation(
        M=M, N=N, P0=P0, P1=P1, beta=beta, eigenvalues=optimal_eigenvalues(M, N).values
    )
    note = f"odd L: M=floor(L/2)={M}" if cfg.L % 2 else ""
    return _from_allocation(SchemeId.RELAY_BC_FIXED, alloc, chan, cfg, note)


def _opportunistic(chan: ChannelState, cfg: NetworkConfig, opts: SolverOptions) -> SchemeResult:
    """Per-block choice between direct-only backscatter and the equal-time relay."""
    direct = _bc_only(chan, cfg)
    try:
        relay = _relay_fixed(chan, cfg, opts)
    except AllocationInfeasibleError:
        relay = None
    if relay is None or direct.throughput >= relay.throughput:
        chosen, mode = direct, "direct"
    else:
        chosen, mode = relay, "relay"
    note = f"mode={mode}" + (f"; {chosen.note}" if chosen.note else "")
    return chosen.model_copy(update={"scheme": SchemeId.OPPORTUNISTIC, "note": note})


def _peak_p0(rho: float, cfg: NetworkConfig) -> float:
    return min(cfg.Pmax, cfg.P / rho)


def _upper_direct(rho: float, k: LinkConstants, cfg: NetworkConfig) -> float:
    """R_SD with the whole budget on the carrier, bits/block."""
    return float(k.tsw * rho * safe_log2(k.B + k.k_sd * _peak_p0(rho, cfg)))


def _upper_relayed(
    rho: float, k: LinkConstants, cfg: NetworkConfig, tol: float
) -> Tuple[float, float, float]:
    """Best min(R_SR, R_SD + R_RD) at split rho as (bits/block, P0, P1).

    P1 takes whatever budget P0 leaves, so the search runs over P0 alone. Both rates are
    concave in P0 along that line, which keeps their minimum unimodal.
    """
    share = 1.0 - rho

    def relay_power(P0: float) -> float:
        if share <= 0.0:
            return 0.0
        return min(cfg.Pmax, max(cfg.P - rho * P0, 0.0) / share)

    def bound(P0: float) -> float:
        sr = rho * safe_log2(k.A + k.k_sr * P0)
        d = rho * safe_log2(k.B + k.k_sd * P0) + share * safe_log2(1.0 + k.k_rd * relay_power(P0))
        return float(k.tsw * min(sr, d))

    P0, value = maximize_unimodal(bound, k.p0_min, _peak_p0(rho, cfg), tol)
    return value, P0, relay_power(P0)


def _related_upper(chan: ChannelState, cfg: NetworkConfig, opts: SolverOptions) -> SchemeResult:
    """Continuous-time optimum of the upper bound R_sum0 (R'_D replaced by R_SD + R_RD).

    The direct and relayed branches are concave in the split once the powers are
    optimised out, so each gets its own bounded scalar search and the larger is kept.
    """
    k = LinkConstants.build(chan, cfg)
    rho_min = opts.rho_min_factor / cfg.L
    rho_max = 1.0 if k.p0_min == 0.0 else min(1.0, cfg.P / k.p0_min)
    if k.p0_min > cfg.Pmax or rho_max < rho_min:
        raise AllocationInfeasibleError(
            InfeasibleStage.CONTINUOUS,
            f"circuit floor {k.p0_min:.6g} W leaves no split in [{rho_min:.6g}, 1]",
        )
    tol = opts.bisect_tol

    rho_d, direct = maximize_unimodal(lambda r: _upper_direct(r, k, cfg), rho_min, rho_max, tol)
    rho_r, relayed = maximize_unimodal(
        lambda r: _upper_relayed(r, k, cfg, tol)[0], rho_min, rho_max, tol
    )
    logger.debug(f"upper bound: direct {direct:.6f} at {rho_d:.6f}, relayed {relayed:.6f}")

    if direct >= relayed:
        rho, throughput, P0, P1, mode = rho_d, direct, _peak_p0(rho_d, cfg), 0.0, "direct"
    else:
        throughput, P0, P1 = _upper_relayed(rho_r, k, cfg, tol)
        rho, mode = rho_r, "relayed"
    return SchemeResult(
        scheme=SchemeId.RELATED_UPPER,
        throughput=throughput,
        rho=rho,
        P0=P0,
        P1=P1,
        note=f"continuous split, upper-bound objective, {mode} branch",
    )


def evaluate_scheme(
    scheme: SchemeId,
    chan: ChannelState,
    cfg: NetworkConfig,
    opts: Optional[SolverOptions] = None,
) -> SchemeResult:
    """Run one scheme on one scenario."""
    opts = opts or SolverOptions()
    scheme = SchemeId(scheme)

    if scheme == SchemeId.PROPOSED:
        report = allocate(chan, cfg, opts)
        return SchemeResult(
            scheme=scheme,
            throughput=report.throughput,
            allocation=report.allocation,
            case=report.case.value,
            rule=report.integer_rule_used.value if report.integer_rule_used else None,
            iterations=report.iterations,
            rho=report.continuous.rho if report.continuous else None,
            P0=report.allocation.P0,
            P1=report.allocation.P1,
            sca_trace=report.sca_trace,
        )
    if scheme == SchemeId.EXHAUSTIVE:
        report = exhaustive_allocate(chan, cfg, opts)
        return SchemeResult(
            scheme=scheme,
            throughput=report.throughput,
            allocation=report.allocation,
            case=report.case.value,
            rho=report.allocation.M / cfg.L,
            P0=report.allocation.P0,
            P1=report.allocation.P1,
            note=f"{len(report.candidates)} splits",
        )
    if scheme == SchemeId.BC_ONLY:
        return _bc_only(chan, cfg)
    if scheme == SchemeId.RELAY_BC_FIXED:
        return _relay_fixed(chan, cfg, opts)
    if scheme == SchemeId.OPPORTUNISTIC:
        return _opportunistic(chan, cfg, opts)
    return _related_upper(chan, cfg, opts)


def scheme_throughput(
    scheme: SchemeId,
    chan: ChannelState,
    cfg: NetworkConfig,
    opts: Optional[SolverOptions] = None,
) -> float:
    """Throughput of a scheme, bits/block."""
    return evaluate_scheme(scheme, chan, cfg, opts).throughput
