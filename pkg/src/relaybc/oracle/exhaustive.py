"""Exhaustive search over the integer subframe split, and the time-sharing gap."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, Field

from relaybc.allocator import SolutionCase, SolverOptions, SolverReport, allocate, reoptimize_powers
from relaybc.core.allocation import Allocation
from relaybc.core.channel import ChannelState
from relaybc.core.config import NetworkConfig
from relaybc.core.constraints import check_constraints
from relaybc.core.errors import (
    AllocationInfeasibleError,
    InfeasibleStage,
    RelayBCError,
    SearchSpaceError,
)
from relaybc.linmap import optimal_eigenvalues
from relaybc.throughput import rate_sum

logger = logging.getLogger(__name__)

MAX_SUBFRAMES = 1000


class CandidateRow(BaseModel):
    """Best power allocation at one split M."""

    M: int
    N: int
    status: str = Field(..., description="'ok', 'idle' (M = 0) or the failing stage")
    throughput: float = 0.0
    P0: Optional[float] = None
    P1: Optional[float] = None
    beta: Optional[float] = None
    reason: str = ""


class ExhaustiveReport(SolverReport):
    """SolverReport of the best split plus the per-M candidate table."""

    candidates: List[CandidateRow] = Field(default_factory=list)

    def candidates_frame(self) -> pd.DataFrame:
        return pd.DataFrame([c.model_dump() for c in self.candidates])

    def write_candidates_csv(self, path: str) -> None:
        self.candidates_frame().to_csv(path, index=False, float_format="%.12g")


def _idle_allocation(cfg: NetworkConfig) -> Allocation:
    return Allocation(M=0, N=cfg.L, P0=0.0, P1=0.0, beta=0.0, eigenvalues=[])


def _evaluate_split(
    M: int, chan: ChannelState, cfg: NetworkConfig, opts: SolverOptions
) -> CandidateRow:
    N = cfg.L - M
    if M == 0:
        return CandidateRow(M=0, N=N, status="idle", throughput=0.0, P0=0.0, P1=0.0, beta=0.0)
    try:
        P0, P1, beta = reoptimize_powers(M, N, chan, cfg, opts)
    except AllocationInfeasibleError as exc:
        return CandidateRow(M=M, N=N, status=exc.stage.value, reason=exc.reason)
    except RelayBCError as exc:
        return CandidateRow(M=M, N=N, status=InfeasibleStage.ORACLE.value, reason=str(exc))

    alloc = Allocation(
        M=M, N=N, P0=P0, P1=P1, beta=beta, eigenvalues=optimal_eigenvalues(M, N).values
    )
    violations = check_constraints(alloc, chan, cfg)
    if violations:
        names = ",".join(v.constraint for v in violations)
        return CandidateRow(
            M=M, N=N, status=InfeasibleStage.AUDIT.value, P0=P0, P1=P1, beta=beta, reason=names
        )
    return CandidateRow(
        M=M,
        N=N,
        status="ok",
        throughput=rate_sum(alloc, chan, cfg).r_sum,
        P0=P0,
        P1=P1,
        beta=beta,
    )


def exhaustive_allocate(
    chan: ChannelState,
    cfg: NetworkConfig,
    opts: Optional[SolverOptions] = None,
    threads: int = 1,
) -> ExhaustiveReport:
    """Enumerate M = 0..L, re-optimise powers at each split and keep the best.

    Ties go to the smallest M. M = 0 is a zero-throughput candidate; the search is
    infeasible when no split with M >= 1 is feasible.
    """
    opts = opts or SolverOptions()
    if cfg.L > MAX_SUBFRAMES:
        raise SearchSpaceError(f"L={cfg.L} exceeds the enumeration guard of {MAX_SUBFRAMES}")

    splits = range(cfg.L + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda M: _evaluate_split(M, chan, cfg, opts), splits))
    else:
        rows = [_evaluate_split(M, chan, cfg, opts) for M in splits]

    feasible = [r for r in rows if r.status in ("ok", "idle")]
    if not any(r.status == "ok" for r in feasible):
        raise AllocationInfeasibleError(
            InfeasibleStage.ORACLE, "no split with M >= 1 is feasible", rows
        )
    best = max(feasible, key=lambda r: (r.throughput, -r.M))

    if best.M == 0:
        alloc = _idle_allocation(cfg)
    else:
        alloc = Allocation(
            M=best.M,
            N=best.N,
            P0=best.P0,
            P1=best.P1,
            beta=best.beta,
            eigenvalues=optimal_eigenvalues(best.M, best.N).values,
        )
    breakdown = rate_sum(alloc, chan, cfg)
    if chan.direct_dominant:
        case = SolutionCase.CASE2
    elif best.M >= best.N:
        case = SolutionCase.CASE1_HIGHRHO
    else:
        case = SolutionCase.CASE1_LOWRHO

    logger.info(
        f"exhaustive search over {len(rows)} splits: best M={best.M}, "
        f"{best.throughput:.4f} bits"
    )
    return ExhaustiveReport(
        allocation=alloc,
        throughput=breakdown.r_sum,
        breakdown=breakdown,
        case=case,
        energy_per_block=cfg.energy_per_block,
        candidates=rows,
    )


class GapPoint(BaseModel):
    """Oracle minus proposed throughput at one L."""

    L: int
    gap: Optional[float] = Field(None, description="bits/block; None when either side failed")
    proposed: Optional[float] = None
    oracle: Optional[float] = None
    proposed_M: Optional[int] = None
    oracle_M: Optional[int] = None
    status: str = "ok"


def timesharing_gap(
    chan: ChannelState,
    cfg_base: NetworkConfig,
    L_list: Sequence[int],
    opts: Optional[SolverOptions] = None,
) -> List[GapPoint]:
    """Gap caused by rounding the time-shared split, for each L."""
    if not L_list:
        raise ValueError("L_list must not be empty")
    opts = opts or SolverOptions()
    points = []
    for L in L_list:
        cfg = cfg_base.with_updates(L=int(L))
        try:
            proposed = allocate(chan, cfg, opts)
            oracle = exhaustive_allocate(chan, cfg, opts)
        except AllocationInfeasibleError as exc:
            logger.warning(f"gap at L={L} unavailable: {exc}")
            points.append(GapPoint(L=int(L), status=exc.stage.value))
            continue
        points.append(
            GapPoint(
                L=int(L),
                gap=oracle.throughput - proposed.throughput,
                proposed=proposed.throughput,
                oracle=oracle.throughput,
                proposed_M=proposed.allocation.M,
                oracle_M=oracle.allocation.M,
            )
        )
        logger.info(f"L={L}: gap {points[-1].gap:.6f} bits")
    return points
