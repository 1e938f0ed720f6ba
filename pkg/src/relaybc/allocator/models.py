"""Records produced and consumed by the allocation pipeline."""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings

from relaybc.core.allocation import Allocation
from relaybc.kernel.program import KernelOptions
from relaybc.throughput.rates import RateBreakdown


class SolutionCase(str, Enum):
    """Which continuous subproblem produced the solution."""

    CASE1_HIGHRHO = "case1-highrho"
    CASE1_LOWRHO = "case1-lowrho"
    CASE2 = "case2"


class IntegerRule(str, Enum):
    """How the continuous split rho*L was rounded."""

    FLOOR = "floor"
    CEIL = "ceil"
    CONDITION1 = "condition1"
    CONDITION2 = "condition2"


class SolverOptions(BaseSettings):
    """Solver tolerances, caps and the SCA starting point.

    Every field can be overridden from the environment, e.g.
    RELAYBC_SCA_MAX_ITER=30 or RELAYBC_KERNEL__TOL=1e-9.
    """

    sca_tol: float = Field(1e-5, gt=0.0, description="Relative SCA improvement threshold")
    sca_max_iter: int = Field(20, ge=1)
    bisect_tol: float = Field(1e-10, gt=0.0)
    rho0: float = Field(0.7, gt=0.0, lt=1.0)
    a0: float = Field(6.0, ge=0.0)
    b0: Optional[float] = Field(None, ge=0.0, description="Defaults to a projected P(1-rho0)/2")
    max_restarts: int = Field(5, ge=0)
    equal_power_rtol: float = Field(1e-6, gt=0.0)
    rho_min_factor: float = Field(0.1, gt=0.0, lt=1.0, description="rho_min = factor / L")
    kernel: KernelOptions = Field(default_factory=KernelOptions)

    class Config:
        env_prefix = "RELAYBC_"
        env_nested_delimiter = "__"
        case_sensitive = False


class ScaStep(BaseModel):
    """One accepted SCA iterate of the high-rho branch."""

    iteration: int
    rho: float
    a: float
    b: float
    t: float = Field(..., description="min(R_SR, R_D) at the iterate, bits/block")


class ContinuousSolution(BaseModel):
    """Optimum of the time-shared (continuous rho) problem."""

    P0: float
    P1: float
    rho: float
    beta: float
    t: float = Field(..., description="min(R_SR, R_D), bits/block")
    objective: float = Field(
        ..., description="Solver optimum, bits/block: the kernel t in case 1, q(rho) in case 2"
    )
    case: SolutionCase
    iterations: int = 0
    sca_trace: List[ScaStep] = Field(default_factory=list)
    flags: List[str] = Field(default_factory=list)


class SurrogatePoint(BaseModel):
    """Expansion point of the SCA surrogates with function values and derivatives."""

    rho_j: float = Field(..., gt=0.0, lt=1.0)
    a_j: float = Field(..., ge=0.0)
    b_j: float = Field(..., ge=0.0)
    y: float
    f: float
    g: float
    w: float
    y_prime: float
    f_rho: float
    f_b: float
    f_rhorho: float
    g_rho: float
    g_a: float
    g_aa: float
    w_rho: float
    w_a: float
    w_aa: float


class SolverReport(BaseModel):
    """Outcome of one allocation run."""

    allocation: Allocation
    throughput: float = Field(..., description="rate_sum of the allocation, bits/block")
    breakdown: RateBreakdown
    case: SolutionCase
    continuous: Optional[ContinuousSolution] = None
    sca_trace: List[ScaStep] = Field(default_factory=list)
    integer_rule_used: Optional[IntegerRule] = None
    iterations: int = 0
    energy_per_block: float = Field(..., description="P * Ts, J")

    def serialize(self) -> str:
        """Serializes the report to JSON."""
        return self.model_dump_json(indent=2)

    @classmethod
    def deserialize(cls, data: str) -> "SolverReport":
        return cls.model_validate_json(data)
