"""Validation - invariant suites behind `relaybc validate`."""

from .registry import CheckResult, CheckStatus, SuiteRegistry, ValidationSuite
from .suites import (
    ConstraintAuditSuite,
    DeterminantChainSuite,
    EigenOptimalitySuite,
    GapTrendSuite,
    OracleDominanceSuite,
    ReductionSuite,
    ScaConvergenceSuite,
    SchemeOrderingSuite,
    SubframeTrendSuite,
    SurrogateSuite,
    audit_report,
    default_registry,
)

__all__ = [
    "CheckResult",
    "CheckStatus",
    "SuiteRegistry",
    "ValidationSuite",
    "ConstraintAuditSuite",
    "DeterminantChainSuite",
    "EigenOptimalitySuite",
    "GapTrendSuite",
    "OracleDominanceSuite",
    "ReductionSuite",
    "ScaConvergenceSuite",
    "SchemeOrderingSuite",
    "SubframeTrendSuite",
    "SurrogateSuite",
    "audit_report",
    "default_registry",
]
