"""Throughput - closed-form link rates, the achievable throughput and its upper bound."""

from .rates import (
    BoundCase,
    CaseClassification,
    RateBreakdown,
    ThroughputRegime,
    classify_case,
    equal_time_reference,
    link_snrs,
    rate_relay_combined,
    rate_sd,
    rate_sr,
    rate_sum,
    rate_sum_upper,
)

__all__ = [
    "BoundCase",
    "CaseClassification",
    "RateBreakdown",
    "ThroughputRegime",
    "classify_case",
    "equal_time_reference",
    "link_snrs",
    "rate_relay_combined",
    "rate_sd",
    "rate_sr",
    "rate_sum",
    "rate_sum_upper",
]
