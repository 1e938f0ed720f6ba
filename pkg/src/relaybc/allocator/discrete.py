"""Integer subframe split and power re-optimisation at a fixed split."""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from relaybc.allocator.continuous import optimal_beta
from relaybc.allocator.forms import LN2, LinkConstants, fill_budget, safe_log2
from relaybc.allocator.models import ContinuousSolution, IntegerRule, SolverOptions
from relaybc.core.allocation import Allocation
from relaybc.core.channel import ChannelState
from relaybc.core.config import NetworkConfig
from relaybc.core.errors import AllocationInfeasibleError, InfeasibleStage
from relaybc.kernel import ConcaveProgram, ConvexConstraint, KernelStatus, maximize_concave
from relaybc.linmap import optimal_eigenvalues
from relaybc.throughput import rate_sum

logger = logging.getLogger(__name__)

INTEGRAL_TOL = 1e-9
MIN_BACKSCATTER = 1


def _clamp(M: int, L: int) -> int:
    return min(max(M, MIN_BACKSCATTER), L)


def integer_convert(
    cont: ContinuousSolution,
    chan: ChannelState,
    cfg: NetworkConfig,
    rtol: float = 1e-6,
) -> Tuple[int, int, IntegerRule]:
    """Round M* = rho*L to a subframe count.

    P0 > P1 rounds down, P0 < P1 rounds up. With equal powers both neighbours are
    scored with rate_sum and the floor is kept unless the ceiling is strictly better.

    Every continuous solution has rho > 0, and a split without backscatter subframes
    carries no data, so M is kept at one or more.

    Returns:
        (M, N, rule) with M clamped to [1, L] and N = L - M
    """
    L = cfg.L
    m_star = cont.rho * L
    lower, upper = math.floor(m_star), math.ceil(m_star)
    if abs(m_star - round(m_star)) <= INTEGRAL_TOL * L:
        lower = upper = int(round(m_star))

    if abs(cont.P0 - cont.P1) <= rtol * max(abs(cont.P0), abs(cont.P1)):
        scores = []
        for M in (lower, upper):
            M = _clamp(M, L)
            alloc = Allocation(
                M=M,
                N=L - M,
                P0=cont.P0,
                P1=cont.P1,
                beta=cont.beta,
                eigenvalues=optimal_eigenvalues(M, L - M).values,
            )
            scores.append(rate_sum(alloc, chan, cfg).r_sum)
        if scores[0] >= scores[1]:
            M, rule = lower, IntegerRule.CONDITION1
        else:
            M, rule = upper, IntegerRule.CONDITION2
    elif cont.P0 > cont.P1:
        M, rule = lower, IntegerRule.FLOOR
    else:
        M, rule = upper, IntegerRule.CEIL

    clamped = _clamp(M, L)
    if clamped != M:
        logger.warning(f"integer split {M} clamped to {clamped}")
    logger.info(f"M*={m_star:.4f} -> M={clamped} ({rule.value})")
    return clamped, L - clamped, rule


def _power_program(M: int, N: int, k: LinkConstants, cfg: NetworkConfig) -> ConcaveProgram:
    """max tau over (P0, P1, tau) at a fixed split, tau = t / TsW."""
    L = cfg.L
    m, n = M / L, N / L

    def relay_rate(x):
        sd = k.B + k.k_sd * x[0]
        if M >= N:
            return n * safe_log2(sd + k.k_rd * x[1]) + (m - n) * safe_log2(sd)
        return m * safe_log2(sd + (N / M) * k.k_rd * x[1])

    def relay_grad(x):
        sd = k.B + k.k_sd * x[0]
        if M >= N:
            both = sd + k.k_rd * x[1]
            d0 = n * k.k_sd / (both * LN2) + (m - n) * k.k_sd / (sd * LN2)
            d1 = n * k.k_rd / (both * LN2)
        else:
            both = sd + (N / M) * k.k_rd * x[1]
            d0 = m * k.k_sd / (both * LN2)
            d1 = m * (N / M) * k.k_rd / (both * LN2)
        return np.array([-d0, -d1, 1.0])

    constraints = (
        ConvexConstraint(
            "budget",
            lambda x: m * x[0] + n * x[1] - cfg.P,
            lambda x: np.array([m, n, 0.0]),
        ),
        ConvexConstraint(
            "rate-sr",
            lambda x: x[2] - m * safe_log2(k.A + k.k_sr * x[0]),
            lambda x: np.array([-m * k.k_sr / ((k.A + k.k_sr * x[0]) * LN2), 0.0, 1.0]),
        ),
        ConvexConstraint("rate-d", lambda x: x[2] - relay_rate(x), relay_grad),
    )

    P0_s = 0.5 * (k.p0_min + min(cfg.Pmax, cfg.P / m))
    P1_s = 0.5 * min(cfg.Pmax, max(cfg.P - m * P0_s, 0.0) / n)
    return ConcaveProgram(
        dim=3,
        objective=lambda x: float(x[2]),
        gradient=lambda x: np.array([0.0, 0.0, 1.0]),
        lower=[k.p0_min, 0.0, 0.0],
        upper=[cfg.Pmax, cfg.Pmax, np.inf],
        constraints=constraints,
        start=[P0_s, P1_s, 0.0],
        names=("P0", "P1", "tau"),
    )


def reoptimize_powers(
    M: int,
    N: int,
    chan: ChannelState,
    cfg: NetworkConfig,
    opts: Optional[SolverOptions] = None,
) -> Tuple[float, float, float]:
    """Optimal (P0, P1, beta) at a fixed integer split.

    Case 2 uses P0 = min(P*L/M, Pmax), P1 = 0. Case 1 solves the concave power
    program, except for the closed forms N = 0 (P0 = P) and P = Pmax (both at peak).
    """
    opts = opts or SolverOptions()
    if M + N != cfg.L or M < 0 or N < 0:
        raise AllocationInfeasibleError(
            InfeasibleStage.REOPTIMIZE, f"split ({M}, {N}) does not partition L={cfg.L}"
        )
    if M == 0:
        raise AllocationInfeasibleError(
            InfeasibleStage.REOPTIMIZE, "no backscatter subframes (M = 0)"
        )

    k = LinkConstants.build(chan, cfg)
    rho = M / cfg.L
    if k.p0_min * rho > cfg.P * (1.0 + 1e-12) or k.p0_min > cfg.Pmax:
        raise AllocationInfeasibleError(
            InfeasibleStage.REOPTIMIZE,
            f"circuit floor {k.p0_min:.6g} W cannot be met with M={M} within the budget",
        )

    if chan.direct_dominant:
        P0 = min(cfg.P * cfg.L / M, cfg.Pmax)
        return P0, 0.0, optimal_beta(P0, chan, cfg)

    if N == 0:
        P0, P1 = cfg.P, 0.0
    elif cfg.P >= cfg.Pmax:
        P0, P1 = cfg.Pmax, cfg.Pmax
    else:
        res = maximize_concave(_power_program(M, N, k, cfg), opts.kernel)
        if not res.ok:
            raise AllocationInfeasibleError(
                InfeasibleStage.REOPTIMIZE, f"power program infeasible at M={M}: {res.message}"
            )
        if res.status == KernelStatus.MAX_ITER:
            logger.warning(f"power program hit the iteration cap at M={M}")
        P0, P1 = fill_budget(rho, float(res.x[0]), float(res.x[1]), cfg, k.p0_min)
        logger.debug(f"power program at M={M}: {res.iterations} kernel iterations")

    return P0, P1, optimal_beta(P0, chan, cfg)
