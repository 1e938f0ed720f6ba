"""
End-to-end allocation: case dispatch, continuous solve, integer split,
power re-optimisation, constraint audit and final throughput.
"""
import logging
from typing import Optional

from relaybc.allocator.continuous import solve_case1, solve_case2
from relaybc.allocator.discrete import integer_convert, reoptimize_powers
from relaybc.allocator.models import SolverOptions, SolverReport
from relaybc.core.allocation import Allocation
from relaybc.core.channel import ChannelState, min_backscatter_power
from relaybc.core.config import NetworkConfig
from relaybc.core.constraints import check_constraints
from relaybc.core.errors import AllocationInfeasibleError, InfeasibleStage
from relaybc.linmap import optimal_eigenvalues
from relaybc.throughput import rate_sum

logger = logging.getLogger(__name__)


def allocate(
    chan: ChannelState, cfg: NetworkConfig, opts: Optional[SolverOptions] = None
) -> SolverReport:
    """Solve one scenario.

    Args:
        chan: Link gains (see channel_gains)
        cfg: Scenario
        opts: Solver options; defaults read the RELAYBC_* environment

    Returns:
        SolverReport whose throughput is rate_sum of the audited allocation

    Raises:
        AllocationInfeasibleError: naming the stage that failed
    """
    opts = opts or SolverOptions()
    p0_min = min_backscatter_power(chan, cfg)
    if p0_min > cfg.Pmax:
        raise AllocationInfeasibleError(
            InfeasibleStage.PRC,
            f"circuit power needs P0 >= {p0_min:.6g} W but Pmax = {cfg.Pmax:.6g} W",
        )

    if chan.direct_dominant:
        logger.info("g_sd > g_sr: direct link dominates, relay switched off")
        cont = solve_case2(chan, cfg, opts)
    else:
        cont = solve_case1(chan, cfg, opts)

    M, N, rule = integer_convert(cont, chan, cfg, opts.equal_power_rtol)
    P0, P1, beta = reoptimize_powers(M, N, chan, cfg, opts)
    alloc = Allocation(
        M=M,
        N=N,
        P0=P0,
        P1=P1,
        beta=beta,
        eigenvalues=optimal_eigenvalues(M, N).values,
    )

    violations = check_constraints(alloc, chan, cfg)
    if violations:
        raise AllocationInfeasibleError(
            InfeasibleStage.AUDIT,
            "final allocation fails the constraint audit",
            violations,
        )

    breakdown = rate_sum(alloc, chan, cfg)
    logger.info(
        f"allocation M={M}, N={N}, P0={P0:.4f} W, P1={P1:.4f} W, beta={beta:.6f}: "
        f"{breakdown.r_sum:.4f} bits/block"
    )
    return SolverReport(
        allocation=alloc,
        throughput=breakdown.r_sum,
        breakdown=breakdown,
        case=cont.case,
        continuous=cont,
        sca_trace=cont.sca_trace,
        integer_rule_used=rule,
        iterations=cont.iterations,
        energy_per_block=cfg.energy_per_block,
    )
