"""Oracle - exhaustive split enumeration and the time-sharing gap study."""

from .exhaustive import (
    CandidateRow,
    ExhaustiveReport,
    GapPoint,
    exhaustive_allocate,
    timesharing_gap,
)

__all__ = [
    "CandidateRow",
    "ExhaustiveReport",
    "GapPoint",
    "exhaustive_allocate",
    "timesharing_gap",
]
