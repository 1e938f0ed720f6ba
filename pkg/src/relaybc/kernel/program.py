"""Problem and option records for the concave-maximisation kernel."""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

ScalarFn = Callable[[np.ndarray], float]
GradientFn = Callable[[np.ndarray], np.ndarray]


class KernelStatus(str, Enum):
    """Outcome of a kernel solve."""

    OPTIMAL = "optimal"
    MAX_ITER = "max-iter"
    INFEASIBLE = "infeasible"


class KernelOptions(BaseModel):
    """Tolerances and barrier schedule of the interior-point kernel."""

    tol: float = Field(1e-8, gt=0.0, description="Stationarity / step tolerance")
    max_iter: int = Field(500, ge=1, description="Iteration cap per solve")
    feas_tol: float = Field(1e-7, gt=0.0, description="Scaled constraint-violation tolerance")
    initial_barrier_parameter: float = Field(0.1, gt=0.0)
    initial_barrier_tolerance: float = Field(0.1, gt=0.0)
    barrier_tol: float = Field(1e-8, gt=0.0, description="Final barrier parameter")
    interior_margin: float = Field(1e-6, gt=0.0, lt=0.5, description="Start offset from box faces")
    polish: bool = Field(True, description="Finish with an SLSQP step from the barrier solution")
    polish_ftol: float = Field(1e-12, gt=0.0, description="SLSQP objective tolerance")
    check_gradients: bool = Field(False, description="Compare gradients with central differences")


@dataclass(frozen=True)
class ConvexConstraint:
    """g(x) <= 0 with g convex and differentiable."""

    name: str
    fun: ScalarFn
    grad: GradientFn


@dataclass(frozen=True)
class ConcaveProgram:
    """maximize objective(x) over a box subject to convex constraints."""

    dim: int
    objective: ScalarFn
    gradient: GradientFn
    lower: Sequence[float]
    upper: Sequence[float]
    constraints: Tuple[ConvexConstraint, ...] = ()
    start: Optional[Sequence[float]] = None
    names: Tuple[str, ...] = ()

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        return lower, upper

    def constraint_values(self, x: np.ndarray) -> np.ndarray:
        return np.array([c.fun(x) for c in self.constraints], dtype=float)

    def constraint_jacobian(self, x: np.ndarray) -> np.ndarray:
        return np.vstack([c.grad(x) for c in self.constraints])


@dataclass
class KernelResult:
    """Solution returned by maximize_concave."""

    x: np.ndarray
    objective: float
    status: KernelStatus
    iterations: int = 0
    max_violation: float = 0.0
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status != KernelStatus.INFEASIBLE
