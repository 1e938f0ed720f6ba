"""
Core model - scenario configuration, channel gains, energy accounting and
the constraint audit shared by every solver stage.
"""

from .allocation import Allocation, harvested_energy
from .channel import (
    ChannelState,
    FeasibilityConstants,
    channel_gains,
    feasibility_constants,
    min_backscatter_power,
    path_gain,
)
from .config import NetworkConfig, dbm_per_hz_to_w, default_config, load_config
from .constraints import ConstraintViolation, check_constraints, raise_for_violations
from .errors import (
    AllocationInfeasibleError,
    ConfigError,
    ConstraintViolationError,
    CsvFormatError,
    DegenerateGeometryError,
    InfeasiblePowerError,
    InfeasibleStage,
    KernelDomainError,
    NumericError,
    RelayBCError,
    SearchSpaceError,
)

__all__ = [
    "Allocation",
    "harvested_energy",
    "ChannelState",
    "FeasibilityConstants",
    "channel_gains",
    "feasibility_constants",
    "min_backscatter_power",
    "path_gain",
    "NetworkConfig",
    "dbm_per_hz_to_w",
    "default_config",
    "load_config",
    "ConstraintViolation",
    "check_constraints",
    "raise_for_violations",
    "AllocationInfeasibleError",
    "ConfigError",
    "ConstraintViolationError",
    "CsvFormatError",
    "DegenerateGeometryError",
    "InfeasiblePowerError",
    "InfeasibleStage",
    "KernelDomainError",
    "NumericError",
    "RelayBCError",
    "SearchSpaceError",
]
