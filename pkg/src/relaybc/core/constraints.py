"""
Constraint audit for the allocation problem.
Each check yields a signed slack; negative slack beyond tolerance is a violation.
"""
import logging
import math
from typing import List, Optional

from pydantic import BaseModel

from relaybc.core.allocation import Allocation, harvested_energy
from relaybc.core.channel import ChannelState
from relaybc.core.config import NetworkConfig
from relaybc.core.errors import ConstraintViolationError

logger = logging.getLogger(__name__)

DEFAULT_REL_TOL = 1e-9


class ConstraintViolation(BaseModel):
    """A single failed constraint."""
    constraint: str
    slack: float
    reason: str


def _check_le(
    name: str, lhs: float, rhs: float, reason: str, rel_tol: float
) -> Optional[ConstraintViolation]:
    slack = rhs - lhs
    scale = max(abs(lhs), abs(rhs))
    if slack < -rel_tol * scale or not math.isfinite(slack):
        return ConstraintViolation(constraint=name, slack=slack, reason=reason)
    return None


def check_constraints(
    alloc: Allocation,
    chan: ChannelState,
    cfg: NetworkConfig,
    rel_tol: float = DEFAULT_REL_TOL,
) -> List[ConstraintViolation]:
    """Evaluate C1-C7 and return every violation (empty list means feasible)."""
    L = cfg.L
    checks = [
        _check_le(
            "C1",
            (alloc.M / L) * cfg.Ts * alloc.P0 + (alloc.N / L) * cfg.Ts * alloc.P1,
            cfg.energy_per_block,
            "HAP energy per block exceeds the budget",
            rel_tol,
        ),
        _check_le(
            "C2",
            (alloc.M / L) * cfg.Ts * cfg.Pc,
            harvested_energy(alloc, chan, cfg),
            "harvested energy does not cover the backscatter circuit",
            rel_tol,
        ),
    ]

    if alloc.M + alloc.N != L:
        checks.append(
            ConstraintViolation(
                constraint="C3",
                slack=-float(abs(alloc.M + alloc.N - L)),
                reason=f"M + N = {alloc.M + alloc.N}, expected {L}",
            )
        )

    for count, label in ((alloc.M, "M"), (alloc.N, "N")):
        if count < 0:
            checks.append(
                ConstraintViolation(constraint="C4", slack=float(count), reason=f"{label} < 0")
            )

    # the mapping matrix only exists when both phases are non-empty
    if min(alloc.M, alloc.N) > 0:
        eig = alloc.eigenvalues
        if len(eig) != min(alloc.M, alloc.N):
            checks.append(
                ConstraintViolation(
                    constraint="C5",
                    slack=-float(abs(len(eig) - min(alloc.M, alloc.N))),
                    reason=f"expected {min(alloc.M, alloc.N)} eigenvalues, got {len(eig)}",
                )
            )
        elif min(eig) < 0.0:
            checks.append(
                ConstraintViolation(
                    constraint="C5", slack=min(eig), reason="negative eigenvalue"
                )
            )
        else:
            total = sum(eig)
            if abs(total - alloc.N) > rel_tol * max(alloc.N, 1):
                checks.append(
                    ConstraintViolation(
                        constraint="C5",
                        slack=-abs(total - alloc.N),
                        reason=f"eigenvalues sum to {total}, expected {alloc.N}",
                    )
                )

    for power, label in ((alloc.P0, "P0"), (alloc.P1, "P1")):
        checks.append(_check_le("C6", power, cfg.Pmax, f"{label} above Pmax", rel_tol))
        if power < 0.0:
            checks.append(
                ConstraintViolation(constraint="C6", slack=power, reason=f"{label} negative")
            )

    if alloc.beta < 0.0 or alloc.beta > 1.0:
        checks.append(
            ConstraintViolation(
                constraint="C7",
                slack=-max(-alloc.beta, alloc.beta - 1.0),
                reason=f"beta={alloc.beta} outside [0, 1]",
            )
        )

    violations = [v for v in checks if v is not None]
    if violations:
        logger.debug(f"constraint audit found {len(violations)} violation(s): {violations}")
    return violations


def raise_for_violations(violations: List[ConstraintViolation]) -> None:
    """Raise ConstraintViolationError if the audit found anything."""
    if violations:
        raise ConstraintViolationError(violations)
