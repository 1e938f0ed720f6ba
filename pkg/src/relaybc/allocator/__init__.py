"""Allocator - continuous solvers, integer conversion, power re-optimisation and orchestration."""

from .continuous import (
    direct_link_curvature,
    direct_link_objective,
    direct_link_slope,
    optimal_beta,
    solve_case1,
    solve_case1_highrho,
    solve_case1_lowrho,
    solve_case2,
)
from .discrete import integer_convert, reoptimize_powers
from .forms import ContinuousRates, LinkConstants, continuous_rates, fill_budget
from .models import (
    ContinuousSolution,
    IntegerRule,
    ScaStep,
    SolutionCase,
    SolverOptions,
    SolverReport,
    SurrogatePoint,
)
from .pipeline import allocate
from .surrogates import ScaFunctions, SurrogateBundle, sca_surrogates, surrogate_point

__all__ = [
    "direct_link_curvature",
    "direct_link_objective",
    "direct_link_slope",
    "optimal_beta",
    "solve_case1",
    "solve_case1_highrho",
    "solve_case1_lowrho",
    "solve_case2",
    "integer_convert",
    "reoptimize_powers",
    "ContinuousRates",
    "LinkConstants",
    "continuous_rates",
    "fill_budget",
    "ContinuousSolution",
    "IntegerRule",
    "ScaStep",
    "SolutionCase",
    "SolverOptions",
    "SolverReport",
    "SurrogatePoint",
    "allocate",
    "ScaFunctions",
    "SurrogateBundle",
    "sca_surrogates",
    "surrogate_point",
]
