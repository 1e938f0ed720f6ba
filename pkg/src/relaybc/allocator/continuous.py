"""
Continuous (time-shared) solvers.

Case 1 (g_sd <= g_sr) splits at rho = 1/2. The high-rho branch is nonconvex and is
solved by successive convex approximation. The low-rho branch is jointly concave in
(rho, u = rho*P0, v = (1-rho)*P1) and is solved in one kernel call. Case 2
(g_sd > g_sr) switches the relay off and reduces to a concave scalar problem in rho.
"""
import logging
import math
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from relaybc.allocator.forms import (
    LN2,
    LOG_FLOOR_FLAG,
    LinkConstants,
    continuous_rates,
    fill_budget,
    persp,
    persp_partials,
    safe_log2,
)
from relaybc.allocator.models import ContinuousSolution, ScaStep, SolutionCase, SolverOptions
from relaybc.allocator.surrogates import (
    ScaFunctions,
    SurrogateBundle,
    sca_surrogates,
    surrogate_point,
)
from relaybc.core.channel import ChannelState, min_backscatter_power
from relaybc.core.config import NetworkConfig
from relaybc.core.errors import AllocationInfeasibleError, InfeasiblePowerError, InfeasibleStage
from relaybc.kernel import (
    ConcaveProgram,
    ConvexConstraint,
    KernelStatus,
    bisect_decreasing,
    maximize_concave,
)

logger = logging.getLogger(__name__)

Triple = Tuple[float, float, float]

BETA_RTOL = 1e-9
FEAS_RTOL = 1e-6
HIGHRHO_CENTER = 0.75
LOWRHO_START = 0.35


def optimal_beta(P0: float, chan: ChannelState, cfg: NetworkConfig) -> float:
    """Reflection coefficient that just covers the circuit: 1 - Pc/(eta*P0*g_sr)."""
    if cfg.Pc == 0.0:
        return 1.0
    p0_min = min_backscatter_power(chan, cfg)
    if P0 < p0_min * (1.0 - BETA_RTOL):
        raise InfeasiblePowerError(
            f"P0={P0:.6g} W is below the circuit-power floor {p0_min:.6g} W"
        )
    return float(np.clip(1.0 - cfg.Pc / (cfg.eta * P0 * chan.g_sr), 0.0, 1.0))


def _rho_min(cfg: NetworkConfig, opts: SolverOptions) -> float:
    return opts.rho_min_factor / cfg.L


def _finish(
    rho: float,
    P0: float,
    P1: float,
    case: SolutionCase,
    chan: ChannelState,
    cfg: NetworkConfig,
    objective: Optional[float] = None,
    iterations: int = 0,
    trace: Optional[List[ScaStep]] = None,
    flags: Optional[List[str]] = None,
) -> ContinuousSolution:
    rates = continuous_rates(rho, P0, P1, chan, cfg)
    flags = list(flags or [])
    if rates.floored:
        flags.append(LOG_FLOOR_FLAG)
    solution = ContinuousSolution(
        P0=P0,
        P1=P1,
        rho=rho,
        beta=optimal_beta(P0, chan, cfg),
        t=rates.t,
        objective=rates.t if objective is None else objective,
        case=case,
        iterations=iterations,
        sca_trace=trace or [],
        flags=flags,
    )
    logger.info(
        f"{case.value}: rho={rho:.6f}, P0={P0:.4f} W, P1={P1:.4f} W, t={solution.t:.4f} bits"
    )
    return solution


# --- case 1, high rho -------------------------------------------------------


def _highrho_feasible(rho: float, a: float, b: float, k: LinkConstants, cfg: NetworkConfig) -> bool:
    """Original (non-surrogate) constraints of the high-rho subproblem."""
    if not 0.5 <= rho < 1.0:
        return False
    share = 1.0 - rho
    P0, P1 = a / share, b / share
    slack = FEAS_RTOL * max(1.0, cfg.Pmax)
    return (
        k.p0_min - slack <= P0 <= cfg.Pmax + slack
        and -slack <= P1 <= cfg.Pmax + slack
        and rho * P0 + share * P1 <= cfg.P + slack
    )


def _highrho_start(cfg: NetworkConfig, opts: SolverOptions, rho_min: float) -> Triple:
    rho0 = float(np.clip(opts.rho0, 0.5, 1.0 - rho_min))
    a0 = opts.a0
    if opts.b0 is not None:
        return rho0, a0, opts.b0
    cap = min(cfg.Pmax * (1.0 - rho0), cfg.P - a0 * rho0 / (1.0 - rho0))
    b0 = float(np.clip(cfg.P * (1.0 - rho0) / 2.0, 0.0, max(cap, 0.0)))
    return rho0, a0, b0


def _highrho_center(cfg: NetworkConfig, k: LinkConstants) -> Optional[Triple]:
    rho_c = HIGHRHO_CENTER
    ceiling = min(cfg.Pmax, cfg.P / rho_c)
    if k.p0_min > ceiling:
        return None
    P0c = 0.5 * (k.p0_min + ceiling)
    P1c = 0.5 * min(cfg.Pmax, (cfg.P - rho_c * P0c) / (1.0 - rho_c))
    return rho_c, (1.0 - rho_c) * P0c, (1.0 - rho_c) * P1c


def _restart_points(start: Triple, center: Optional[Triple], restarts: int) -> Iterator[Triple]:
    """The start, then blends moving toward the box centre."""
    yield start
    if center is None or restarts == 0:
        return
    s, c = np.asarray(start), np.asarray(center)
    for k in range(1, restarts + 1):
        lam = k / restarts
        yield tuple(float(v) for v in (1.0 - lam) * s + lam * c)


def _highrho_program(
    bundle: SurrogateBundle,
    fns: ScaFunctions,
    start: Sequence[float],
    cfg: NetworkConfig,
    rho_min: float,
) -> ConcaveProgram:
    """Convexified subproblem in x = (rho, a, b, tau), tau = t / TsW."""
    k = bundle.consts
    P, Pmax, tsw = cfg.P, cfg.Pmax, k.tsw

    def budget(x):
        return x[1] - x[2] + bundle.f_ub(x[0], x[2]) - P * (bundle.y_lb(x[0]) - 1.0)

    def budget_grad(x):
        lin = np.array([0.0, 1.0, -1.0])
        return np.append(lin + bundle.f_ub_grad(x[0], x[2]) - P * bundle.y_lb_grad(x[0]), 0.0)

    def relay_path(x):
        return x[3] - (fns.e(x[0], x[1], x[2]) + bundle.w_lb(x[0], x[1])) / tsw

    def relay_path_grad(x):
        grad = fns.e_grad(x[0], x[1], x[2]) + bundle.w_lb_grad(x[0], x[1])
        return np.append(-grad / tsw, 1.0)

    constraints = (
        ConvexConstraint("budget", budget, budget_grad),
        ConvexConstraint(
            "peak:P0",
            lambda x: x[1] - Pmax * (1.0 - x[0]),
            lambda x: np.array([Pmax, 1.0, 0.0, 0.0]),
        ),
        ConvexConstraint(
            "peak:P1",
            lambda x: x[2] - Pmax * (1.0 - x[0]),
            lambda x: np.array([Pmax, 0.0, 1.0, 0.0]),
        ),
        ConvexConstraint(
            "circuit",
            lambda x: k.p0_min * (1.0 - x[0]) - x[1],
            lambda x: np.array([-k.p0_min, -1.0, 0.0, 0.0]),
        ),
        ConvexConstraint(
            "rate-sr",
            lambda x: x[3] - bundle.g_lb(x[0], x[1]) / tsw,
            lambda x: np.append(-bundle.g_lb_grad(x[0], x[1]) / tsw, 1.0),
        ),
        ConvexConstraint("rate-d", relay_path, relay_path_grad),
    )
    return ConcaveProgram(
        dim=4,
        objective=lambda x: float(x[3]),
        gradient=lambda x: np.array([0.0, 0.0, 0.0, 1.0]),
        lower=[0.5, 0.0, 0.0, 0.0],
        upper=[1.0 - rho_min, Pmax / 2.0, Pmax / 2.0, np.inf],
        constraints=constraints,
        start=start,
        names=("rho", "a", "b", "tau"),
    )


def _sca_run(
    start: Triple,
    chan: ChannelState,
    cfg: NetworkConfig,
    opts: SolverOptions,
    fns: ScaFunctions,
    rho_min: float,
) -> Optional[Tuple[Triple, List[ScaStep], List[str], Optional[float]]]:
    """SCA iterations from one start; None when the first convexified program fails.

    The last item is the kernel's t (bits/block) at the last accepted step.
    """
    k = fns.k
    rho, a, b = start
    t_prev = float(fns.t(rho, a, b))
    trace = [ScaStep(iteration=0, rho=rho, a=a, b=b, t=t_prev)]
    flags: List[str] = []
    tau: Optional[float] = None

    for j in range(1, opts.sca_max_iter + 1):
        bundle = sca_surrogates(surrogate_point(rho, a, b, chan, cfg), chan, cfg)
        tau0 = 0.5 * max(t_prev, 0.0) / k.tsw
        res = maximize_concave(
            _highrho_program(bundle, fns, (rho, a, b, tau0), cfg, rho_min), opts.kernel
        )
        if not res.ok:
            if j == 1:
                return None
            flags.append("sca-kernel-infeasible")
            break
        if res.status == KernelStatus.MAX_ITER and "kernel-max-iter" not in flags:
            flags.append("kernel-max-iter")

        rho_n, a_n, b_n = (float(v) for v in res.x[:3])
        t_new = float(fns.t(rho_n, a_n, b_n))
        if t_new < t_prev or not _highrho_feasible(rho_n, a_n, b_n, k, cfg):
            logger.debug(f"SCA step {j} rejected: t {t_prev:.9g} -> {t_new:.9g}")
            break

        trace.append(ScaStep(iteration=j, rho=rho_n, a=a_n, b=b_n, t=t_new))
        tau = float(res.objective) * k.tsw
        logger.debug(f"SCA step {j}: rho={rho_n:.6f}, a={a_n:.4f}, b={b_n:.4f}, t={t_new:.6f}")
        gain = t_new - t_prev
        converged = gain <= opts.sca_tol * abs(t_prev)
        rho, a, b, t_prev = rho_n, a_n, b_n, t_new
        if converged:
            break
    else:
        flags.append("sca-iteration-cap")
    return (rho, a, b), trace, flags, tau


def solve_case1_highrho(
    chan: ChannelState, cfg: NetworkConfig, opts: Optional[SolverOptions] = None
) -> ContinuousSolution:
    """SCA over the high-rho branch (rho in [1/2, 1 - rho_min]).

    Args:
        chan: Link gains with g_sd <= g_sr
        cfg: Scenario
        opts: Solver options; the SCA starts from (rho0, a0, b0)

    Returns:
        ContinuousSolution labelled case1-highrho, with the accepted SCA trace
    """
    opts = opts or SolverOptions()
    k = LinkConstants.build(chan, cfg)
    fns = ScaFunctions(k)
    rho_min = _rho_min(cfg, opts)
    start = _highrho_start(cfg, opts, rho_min)
    center = _highrho_center(cfg, k)

    for attempt, point in enumerate(_restart_points(start, center, opts.max_restarts)):
        if not _highrho_feasible(*point, k, cfg):
            logger.warning(f"SCA start {attempt} {point} is infeasible, moving toward the centre")
            continue
        run = _sca_run(point, chan, cfg, opts, fns, rho_min)
        if run is None:
            logger.warning(f"kernel infeasible at SCA start {attempt}, restarting")
            continue
        (rho, a, b), trace, flags, tau = run
        if attempt > 0:
            flags.append(f"restart-{attempt}")
        share = 1.0 - rho
        P0, P1 = fill_budget(rho, a / share, b / share, cfg, k.p0_min)
        return _finish(
            rho,
            P0,
            P1,
            SolutionCase.CASE1_HIGHRHO,
            chan,
            cfg,
            objective=tau,
            iterations=len(trace) - 1,
            trace=trace,
            flags=flags,
        )

    raise AllocationInfeasibleError(
        InfeasibleStage.CONTINUOUS, "high-rho branch has no feasible SCA start"
    )


# --- case 1, low rho --------------------------------------------------------


def _lowrho_program(k: LinkConstants, cfg: NetworkConfig, rho_min: float) -> ConcaveProgram:
    """Concave program in x = (rho, u, v, tau), tau = t / TsW."""
    P, Pmax = cfg.P, cfg.Pmax

    def sr_arg(x):
        return k.A * x[0] + k.k_sr * x[1]

    def d_arg(x):
        return k.B * x[0] + k.k_sd * x[1] + k.k_rd * x[2]

    def sr_grad(x):
        d_tau, d_z = persp_partials(x[0], sr_arg(x))
        return np.array([-(d_tau + k.A * d_z), -k.k_sr * d_z, 0.0, 1.0])

    def d_grad(x):
        d_tau, d_z = persp_partials(x[0], d_arg(x))
        return np.array([-(d_tau + k.B * d_z), -k.k_sd * d_z, -k.k_rd * d_z, 1.0])

    constraints = (
        ConvexConstraint(
            "budget", lambda x: x[1] + x[2] - P, lambda x: np.array([0.0, 1.0, 1.0, 0.0])
        ),
        ConvexConstraint(
            "peak:P0", lambda x: x[1] - Pmax * x[0], lambda x: np.array([-Pmax, 1.0, 0.0, 0.0])
        ),
        ConvexConstraint(
            "peak:P1",
            lambda x: x[2] - Pmax * (1.0 - x[0]),
            lambda x: np.array([Pmax, 0.0, 1.0, 0.0]),
        ),
        ConvexConstraint(
            "circuit",
            lambda x: k.p0_min * x[0] - x[1],
            lambda x: np.array([k.p0_min, -1.0, 0.0, 0.0]),
        ),
        ConvexConstraint("rate-sr", lambda x: x[3] - persp(x[0], sr_arg(x)), sr_grad),
        ConvexConstraint("rate-d", lambda x: x[3] - persp(x[0], d_arg(x)), d_grad),
    )

    rho_s = float(np.clip(LOWRHO_START, rho_min, 0.5))
    P0_s = 0.5 * (k.p0_min + min(Pmax, P / rho_s))
    u_s = rho_s * P0_s
    v_s = 0.5 * min(max(P - u_s, 0.0), Pmax * (1.0 - rho_s))
    return ConcaveProgram(
        dim=4,
        objective=lambda x: float(x[3]),
        gradient=lambda x: np.array([0.0, 0.0, 0.0, 1.0]),
        lower=[rho_min, 0.0, 0.0, 0.0],
        upper=[0.5, Pmax / 2.0, Pmax, np.inf],
        constraints=constraints,
        start=[rho_s, u_s, v_s, 0.0],
        names=("rho", "u", "v", "tau"),
    )


def solve_case1_lowrho(
    chan: ChannelState, cfg: NetworkConfig, opts: Optional[SolverOptions] = None
) -> ContinuousSolution:
    """Low-rho branch (rho in [rho_min, 1/2]) as one concave program."""
    opts = opts or SolverOptions()
    k = LinkConstants.build(chan, cfg)
    res = maximize_concave(_lowrho_program(k, cfg, _rho_min(cfg, opts)), opts.kernel)
    if not res.ok:
        raise AllocationInfeasibleError(
            InfeasibleStage.CONTINUOUS, f"low-rho branch infeasible: {res.message}"
        )

    rho, u, v = (float(x) for x in res.x[:3])
    flags = ["kernel-max-iter"] if res.status == KernelStatus.MAX_ITER else []
    P0, P1 = fill_budget(rho, u / rho, v / (1.0 - rho), cfg, k.p0_min)
    return _finish(
        rho,
        P0,
        P1,
        SolutionCase.CASE1_LOWRHO,
        chan,
        cfg,
        objective=float(res.objective) * k.tsw,
        iterations=res.iterations,
        flags=flags,
    )


def solve_case1(
    chan: ChannelState, cfg: NetworkConfig, opts: Optional[SolverOptions] = None
) -> ContinuousSolution:
    """Run both case-1 branches and keep the larger t (high rho wins ties)."""
    results = {}
    reasons = []
    for case, solver in (
        (SolutionCase.CASE1_HIGHRHO, solve_case1_highrho),
        (SolutionCase.CASE1_LOWRHO, solve_case1_lowrho),
    ):
        try:
            results[case] = solver(chan, cfg, opts)
        except AllocationInfeasibleError as exc:
            logger.info(f"{case.value} branch infeasible: {exc.reason}")
            reasons.append(exc.reason)

    if not results:
        raise AllocationInfeasibleError(
            InfeasibleStage.CONTINUOUS, "both case-1 branches are infeasible", reasons
        )
    high = results.get(SolutionCase.CASE1_HIGHRHO)
    low = results.get(SolutionCase.CASE1_LOWRHO)
    if low is None:
        return high
    if high is None:
        return low
    if high.t >= low.t:
        return high
    return low.model_copy(update={"sca_trace": high.sca_trace})


# --- case 2 -----------------------------------------------------------------


def direct_link_objective(rho: float, c: float, B: float, tsw: float) -> float:
    """q(rho) = TsW*rho*log2(B + c/rho), the S-D rate with P0 = P/rho."""
    return float(tsw * rho * safe_log2(B + c / rho))


def direct_link_slope(rho: float, c: float, B: float, tsw: float) -> float:
    return float(tsw * (safe_log2(B + c / rho) - c / ((B * rho + c) * LN2)))


def direct_link_curvature(rho: float, c: float, B: float, tsw: float) -> float:
    """q''(rho); negative wherever B*rho + c > 0."""
    return float(-tsw * c**2 / (rho * (B * rho + c) ** 2 * LN2))


def solve_case2(
    chan: ChannelState, cfg: NetworkConfig, opts: Optional[SolverOptions] = None
) -> ContinuousSolution:
    """Maximise q over [P/Pmax, min(1, P*eta*g_sr/Pc)] with P1 = 0.

    q is concave, so its slope is decreasing: the upper end wins when the slope is
    nonnegative there, the lower end when it is nonpositive there, and otherwise
    the slope is bisected.
    """
    opts = opts or SolverOptions()
    k = LinkConstants.build(chan, cfg)
    lo = cfg.P / cfg.Pmax
    hi = 1.0 if cfg.Pc == 0.0 else min(1.0, cfg.P * cfg.eta * chan.g_sr / cfg.Pc)
    if lo > hi * (1.0 + 1e-12):
        raise AllocationInfeasibleError(
            InfeasibleStage.CONTINUOUS,
            f"case-2 interval is empty: P/Pmax={lo:.6g} > {hi:.6g}",
        )

    c = cfg.P * k.k_sd
    iterations = 0
    if hi <= lo:
        rho = min(lo, hi)
    elif direct_link_slope(hi, c, k.B, k.tsw) >= 0.0:
        rho = hi
    elif direct_link_slope(lo, c, k.B, k.tsw) <= 0.0:
        rho = lo
    else:
        rho = bisect_decreasing(
            lambda r: direct_link_slope(r, c, k.B, k.tsw), lo, hi, opts.bisect_tol
        )
        iterations = max(1, math.ceil(math.log2((hi - lo) / opts.bisect_tol)))

    P0 = min(cfg.P / rho, cfg.Pmax)
    return _finish(
        rho,
        P0,
        0.0,
        SolutionCase.CASE2,
        chan,
        cfg,
        objective=direct_link_objective(rho, c, k.B, k.tsw),
        iterations=iterations,
    )
