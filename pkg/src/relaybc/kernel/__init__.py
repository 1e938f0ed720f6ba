"""Convex kernel - barrier interior-point maximisation, monotone bisection, scalar search."""

from .program import ConcaveProgram, ConvexConstraint, KernelOptions, KernelResult, KernelStatus
from .solver import (
    bisect_decreasing,
    central_gradient,
    max_violation,
    maximize_concave,
    maximize_unimodal,
    verify_gradients,
)

__all__ = [
    "ConcaveProgram",
    "ConvexConstraint",
    "KernelOptions",
    "KernelResult",
    "KernelStatus",
    "bisect_decreasing",
    "central_gradient",
    "max_violation",
    "maximize_concave",
    "maximize_unimodal",
    "verify_gradients",
]
