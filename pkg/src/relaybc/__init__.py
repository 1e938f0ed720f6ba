from relaybc.allocator import SolverOptions, SolverReport, allocate
from relaybc.core import (
    Allocation,
    AllocationInfeasibleError,
    ChannelState,
    NetworkConfig,
    RelayBCError,
    channel_gains,
    check_constraints,
    default_config,
    load_config,
)
from relaybc.experiments import SchemeId, SweepSpec, run_sweep, scheme_throughput
from relaybc.oracle import exhaustive_allocate, timesharing_gap
from relaybc.throughput import RateBreakdown, rate_sum

__version__ = "0.1.0"

__all__ = [
    "SolverOptions",
    "SolverReport",
    "allocate",
    "Allocation",
    "AllocationInfeasibleError",
    "ChannelState",
    "NetworkConfig",
    "RelayBCError",
    "channel_gains",
    "check_constraints",
    "default_config",
    "load_config",
    "SchemeId",
    "SweepSpec",
    "run_sweep",
    "scheme_throughput",
    "exhaustive_allocate",
    "timesharing_gap",
    "RateBreakdown",
    "rate_sum",
]
