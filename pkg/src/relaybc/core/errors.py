"""Exception hierarchy shared by every relaybc module."""

from enum import Enum
from typing import Any, List, Optional


class RelayBCError(Exception):
    """Base class for all relaybc failures."""
    pass


class ConfigError(RelayBCError):
    """Raised when a scenario file cannot be parsed or validated."""
    pass


class DegenerateGeometryError(RelayBCError):
    """Raised when two nodes share a coordinate (zero link distance)."""
    pass


class InfeasiblePowerError(RelayBCError):
    """Raised when P0 is below the circuit-power floor Pc/(eta*g_sr)."""
    pass


class KernelDomainError(RelayBCError):
    """Raised for malformed kernel inputs (empty bracket, bad dimensions)."""
    pass


class NumericError(RelayBCError):
    """Raised on non-finite values or gradient self-check failures."""
    pass


class SearchSpaceError(RelayBCError):
    """Raised when an enumeration would exceed its combinatorial guard."""
    pass


class CsvFormatError(RelayBCError):
    """Raised when a sweep CSV is missing columns or cannot be parsed."""
    pass


class InfeasibleStage(str, Enum):
    """Pipeline stage at which a scenario turned out infeasible."""

    PRC = "prc"
    CONTINUOUS = "continuous"
    INTEGER = "integer"
    REOPTIMIZE = "reoptimize"
    AUDIT = "audit"
    ORACLE = "oracle"


class AllocationInfeasibleError(RelayBCError):
    """Raised when the allocation pipeline cannot produce a feasible point."""

    def __init__(self, stage: InfeasibleStage, reason: str, details: Optional[List[Any]] = None):
        self.stage = stage
        self.reason = reason
        self.details = details or []
        super().__init__(f"infeasible at stage '{stage.value}': {reason}")


class ConstraintViolationError(RelayBCError):
    """Raised by raise_for_violations when an allocation breaks C1-C7."""

    def __init__(self, violations: List[Any]):
        self.violations = violations
        names = ", ".join(v.constraint for v in violations)
        super().__init__(f"allocation violates {names}")
