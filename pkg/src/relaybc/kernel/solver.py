"""
Small dense concave maximisation and monotone bisection.

maximize_concave drives scipy's trust-constr method, whose inequality handling is a
log-barrier interior-point scheme; box bounds are kept feasible on every iterate. The
barrier solution is then polished with SLSQP, which lands on active faces exactly.
"""
import logging
import warnings
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import optimize

from relaybc.core.errors import KernelDomainError, NumericError
from relaybc.kernel.program import (
    ConcaveProgram,
    ConvexConstraint,
    KernelOptions,
    KernelResult,
    KernelStatus,
)

logger = logging.getLogger(__name__)

FD_STEP = 1e-6
FD_RTOL = 1e-4
GRADIENT_CHECK_SEED = 7
GRADIENT_CHECK_STEP = 0.1


def central_gradient(
    fun: Callable[[np.ndarray], float], x: np.ndarray, step: float = FD_STEP
) -> np.ndarray:
    """Central finite-difference gradient."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        grad[i] = (fun(x + e) - fun(x - e)) / (2.0 * step)
    return grad


def verify_gradients(prog: ConcaveProgram, x: np.ndarray) -> None:
    """Raise NumericError if an analytic gradient disagrees with central differences."""
    pairs = [("objective", prog.objective, prog.gradient)]
    pairs += [(c.name, c.fun, c.grad) for c in prog.constraints]
    for name, fun, grad in pairs:
        analytic = np.asarray(grad(x), dtype=float)
        numeric = central_gradient(fun, x)
        if np.linalg.norm(analytic - numeric) > FD_RTOL * max(1.0, np.linalg.norm(analytic)):
            raise NumericError(
                f"gradient of '{name}' disagrees with finite differences: "
                f"{analytic} vs {numeric}"
            )


def _box_center(lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    center = np.zeros_like(lower)
    for i, (lo, hi) in enumerate(zip(lower, upper)):
        if np.isfinite(lo) and np.isfinite(hi):
            center[i] = 0.5 * (lo + hi)
        elif np.isfinite(lo):
            center[i] = lo + 1.0
        elif np.isfinite(hi):
            center[i] = hi - 1.0
    return center


def _pull_inside(
    x: np.ndarray, lower: np.ndarray, upper: np.ndarray, margin: float
) -> np.ndarray:
    """Move x strictly inside the box, margin taken relative to each side's width."""
    x = np.array(x, dtype=float)
    for i, (lo, hi) in enumerate(zip(lower, upper)):
        if np.isfinite(lo) and np.isfinite(hi):
            delta = margin * (hi - lo)
        else:
            delta = margin * max(1.0, abs(lo) if np.isfinite(lo) else abs(hi))
        if np.isfinite(lo):
            x[i] = max(x[i], lo + delta)
        if np.isfinite(hi):
            x[i] = min(x[i], hi - delta)
    return x


def _offset_point(
    x: np.ndarray, lower: np.ndarray, upper: np.ndarray, margin: float
) -> np.ndarray:
    """x moved a fixed fraction toward a seeded random point of the box."""
    rng = np.random.default_rng(GRADIENT_CHECK_SEED)
    target = np.array(x, dtype=float)
    for i, (lo, hi) in enumerate(zip(lower, upper)):
        if np.isfinite(lo) and np.isfinite(hi):
            target[i] = rng.uniform(lo, hi)
        else:
            target[i] = x[i] + rng.uniform(-1.0, 1.0)
    return _pull_inside(x + GRADIENT_CHECK_STEP * (target - x), lower, upper, margin)


def max_violation(prog: ConcaveProgram, x: np.ndarray) -> float:
    """Largest constraint value scaled by its gradient norm (<= 0 when feasible)."""
    worst = -np.inf
    for c in prog.constraints:
        value = c.fun(x)
        scale = max(1.0, float(np.linalg.norm(c.grad(x))))
        worst = max(worst, value / scale)
    return float(worst) if prog.constraints else 0.0


def _trust_constr(
    objective,
    gradient,
    x0: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    constraints,
    opts: KernelOptions,
) -> optimize.OptimizeResult:
    nonlinear = []
    if constraints:
        nonlinear.append(
            optimize.NonlinearConstraint(
                lambda x: np.array([c.fun(x) for c in constraints], dtype=float),
                -np.inf,
                0.0,
                jac=lambda x: np.vstack([c.grad(x) for c in constraints]),
                hess=optimize.BFGS(),
            )
        )
    with warnings.catch_warnings():
        # BFGS skips updates on linear pieces and says so
        warnings.simplefilter("ignore", UserWarning)
        return optimize.minimize(
            lambda x: -objective(x),
            x0,
            jac=lambda x: -np.asarray(gradient(x), dtype=float),
            hess=optimize.BFGS(),
            method="trust-constr",
            bounds=optimize.Bounds(lower, upper, keep_feasible=True),
            constraints=nonlinear,
            options={
                "maxiter": opts.max_iter,
                "gtol": opts.tol,
                "xtol": opts.tol,
                "barrier_tol": opts.barrier_tol,
                "initial_barrier_parameter": opts.initial_barrier_parameter,
                "initial_barrier_tolerance": opts.initial_barrier_tolerance,
                "verbose": 0,
            },
        )


def _polish(
    prog: ConcaveProgram,
    x: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    opts: KernelOptions,
) -> Optional[Tuple[np.ndarray, bool]]:
    """SLSQP from the barrier solution; None unless it ends feasible and no worse."""
    constraints = [
        {
            "type": "ineq",
            "fun": (lambda z, c=c: -float(c.fun(z))),
            "jac": (lambda z, c=c: -np.asarray(c.grad(z), dtype=float)),
        }
        for c in prog.constraints
    ]
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore", RuntimeWarning)
        res = optimize.minimize(
            lambda z: -float(prog.objective(z)),
            x,
            jac=lambda z: -np.asarray(prog.gradient(z), dtype=float),
            method="SLSQP",
            bounds=optimize.Bounds(lower, upper),
            constraints=constraints,
            options={"ftol": opts.polish_ftol, "maxiter": opts.max_iter},
        )
    polished = np.clip(res.x, lower, upper)
    value = float(prog.objective(polished))
    base = float(prog.objective(x))
    if not np.isfinite(value) or max_violation(prog, polished) > opts.feas_tol:
        logger.debug(f"polish rejected: {res.message}")
        return None
    if value < base - opts.polish_ftol * max(1.0, abs(base)):
        logger.debug(f"polish rejected: objective {base:.12g} -> {value:.12g}")
        return None
    return polished, bool(res.success)


def _phase_one(
    prog: ConcaveProgram, x0: np.ndarray, opts: KernelOptions
) -> Tuple[np.ndarray, bool]:
    """Minimise a common slack s over g_k(x) <= s; feasible when the result satisfies all g_k."""
    lower, upper = prog.bounds()
    worst = float(np.max(prog.constraint_values(x0)))
    z_lower = np.append(lower, -1.0)
    z_upper = np.append(upper, worst + 1.0)
    z0 = _pull_inside(np.append(x0, worst + 0.5), z_lower, z_upper, opts.interior_margin)

    def lifted(c: ConvexConstraint) -> ConvexConstraint:
        return ConvexConstraint(
            name=f"phase1:{c.name}",
            fun=lambda z: c.fun(z[:-1]) - z[-1],
            grad=lambda z: np.append(c.grad(z[:-1]), -1.0),
        )

    res = _trust_constr(
        lambda z: -z[-1],
        lambda z: np.append(np.zeros(prog.dim), -1.0),
        z0,
        z_lower,
        z_upper,
        [lifted(c) for c in prog.constraints],
        opts,
    )
    x = np.clip(res.x[:-1], lower, upper)
    feasible = max_violation(prog, x) <= opts.feas_tol
    logger.debug(f"phase one: slack {res.x[-1]:.3e}, feasible={feasible}")
    return x, feasible


def maximize_concave(prog: ConcaveProgram, opts: Optional[KernelOptions] = None) -> KernelResult:
    """Maximise a concave objective over a box and convex constraints.

    Args:
        prog: Program with analytic gradients
        opts: Kernel options (defaults if omitted)

    Returns:
        KernelResult with status optimal, max-iter or infeasible
    """
    opts = opts or KernelOptions()
    lower, upper = prog.bounds()
    if lower.shape != (prog.dim,) or upper.shape != (prog.dim,):
        raise KernelDomainError(f"box bounds must have {prog.dim} entries")
    if np.any(lower > upper):
        raise KernelDomainError("box lower bound exceeds upper bound")

    start = _box_center(lower, upper) if prog.start is None else np.asarray(prog.start, float)
    x0 = _pull_inside(start, lower, upper, opts.interior_margin)
    if opts.check_gradients:
        verify_gradients(prog, x0)
        verify_gradients(prog, _offset_point(x0, lower, upper, opts.interior_margin))

    if prog.constraints and np.max(prog.constraint_values(x0)) >= 0.0:
        x0, feasible = _phase_one(prog, x0, opts)
        if not feasible:
            return KernelResult(
                x=x0,
                objective=float(prog.objective(x0)),
                status=KernelStatus.INFEASIBLE,
                max_violation=max_violation(prog, x0),
                message="no strictly feasible point found",
            )
        x0 = _pull_inside(x0, lower, upper, opts.interior_margin)

    res = _trust_constr(
        prog.objective, prog.gradient, x0, lower, upper, list(prog.constraints), opts
    )
    x = np.clip(res.x, lower, upper)
    converged = res.status in (1, 2)
    if opts.polish and max_violation(prog, x) <= opts.feas_tol:
        polished = _polish(prog, x, lower, upper, opts)
        if polished is not None:
            x, polish_ok = polished
            converged = converged or polish_ok
    violation = max_violation(prog, x)

    if violation > opts.feas_tol:
        status = KernelStatus.INFEASIBLE
    elif converged:
        status = KernelStatus.OPTIMAL
    else:
        status = KernelStatus.MAX_ITER

    objective = float(prog.objective(x))
    if not np.isfinite(objective):
        raise NumericError(f"objective is not finite at {x}")
    logger.debug(
        f"kernel {status.value} after {res.nit} iterations: obj={objective:.9g}, "
        f"violation={violation:.2e}"
    )
    return KernelResult(
        x=x,
        objective=objective,
        status=status,
        iterations=int(res.nit),
        max_violation=violation,
        message=str(res.message),
    )


def bisect_decreasing(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Zero of a nonincreasing f on [lo, hi], or the boundary the sign pattern selects."""
    if not lo < hi:
        raise KernelDomainError(f"empty bracket [{lo}, {hi}]")
    if f(lo) <= 0.0:
        return lo
    if f(hi) >= 0.0:
        return hi
    root = optimize.bisect(f, lo, hi, xtol=tol, maxiter=500)
    return float(root)


def maximize_unimodal(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10
) -> Tuple[float, float]:
    """Maximiser and maximum of a unimodal f on [lo, hi].

    Bounded Brent search; both ends are scored too, since the search never lands on them.
    """
    if lo > hi:
        raise KernelDomainError(f"empty interval [{lo}, {hi}]")
    if hi - lo <= tol:
        return lo, float(f(lo))
    res = optimize.minimize_scalar(
        lambda r: -f(r), bounds=(lo, hi), method="bounded", options={"xatol": tol}
    )
    candidates = [(float(res.x), -float(res.fun)), (lo, float(f(lo))), (hi, float(f(hi)))]
    return max(candidates, key=lambda c: c[1])
