"""
Invariant suites run by `relaybc validate`.

Fast suites check closed forms and surrogates on random instances. Slow suites
replay the figure sweeps and compare against the exhaustive oracle.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from relaybc.allocator import (
    ScaFunctions,
    SolutionCase,
    SolverOptions,
    SolverReport,
    allocate,
    continuous_rates,
    sca_surrogates,
    solve_case1_highrho,
    surrogate_point,
)
from relaybc.core import (
    Allocation,
    ChannelState,
    NetworkConfig,
    channel_gains,
    check_constraints,
    default_config,
    harvested_energy,
    min_backscatter_power,
)
from relaybc.experiments.schemes import SchemeId
from relaybc.experiments.sweep import Preset, RowKind, preset_spec, rows_frame, run_sweep
from relaybc.linmap import (
    brute_force_eigen_search,
    build_mapping_matrix,
    numeric_logdet_rate,
    optimal_eigenvalues,
)
from relaybc.oracle import exhaustive_allocate, timesharing_gap
from relaybc.throughput import (
    classify_case,
    equal_time_reference,
    rate_relay_combined,
    rate_sum,
    rate_sum_upper,
)
from relaybc.validation.registry import CheckResult, SuiteRegistry, ValidationSuite

logger = logging.getLogger(__name__)

ALPHA1_SWEEP = np.round(np.arange(2.5, 4.0 + 1e-9, 0.1), 10).tolist()


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


def audit_report(
    report: SolverReport,
    chan: ChannelState,
    cfg: NetworkConfig,
    rtol: float = 1e-6,
    tau_rtol: float = 1e-3,
) -> List[str]:
    """Constraint audit plus the tightness properties of an optimal allocation.

    Checks C1-C7, that the solver's t meets min(R_SR, R_D) at the continuous
    solution (one rate bound active, within tau_rtol), and in case 1 that the energy
    budget and the circuit-power constraint are tight.
    """
    alloc = report.allocation
    problems = [
        f"{v.constraint} violated ({v.reason}, slack {v.slack:.3e})"
        for v in check_constraints(alloc, chan, cfg)
    ]

    cont = report.continuous
    if cont is not None and cont.case != SolutionCase.CASE2:
        rates = continuous_rates(cont.rho, cont.P0, cont.P1, chan, cfg)
        if _rel(cont.objective, rates.t) > tau_rtol:
            problems.append(
                f"no rate bound active: solver t={cont.objective}, min rate={rates.t}"
            )

    if report.case != SolutionCase.CASE2 and alloc.M > 0:
        used = (alloc.M / cfg.L) * alloc.P0 + (alloc.N / cfg.L) * alloc.P1
        if _rel(used, cfg.P) > rtol:
            problems.append(f"energy budget slack: {used} W used of {cfg.P} W")
        circuit = (alloc.M / cfg.L) * cfg.Ts * cfg.Pc
        harvested = harvested_energy(alloc, chan, cfg)
        if abs(harvested - circuit) > rtol * max(circuit, 1e-300) and circuit > 0.0:
            problems.append(f"circuit constraint slack: harvested {harvested} J, need {circuit} J")
    return problems


def _random_powers(
    rng: np.random.Generator, cfg: NetworkConfig, low: float = 0.0
) -> Tuple[float, float, float]:
    beta = float(rng.uniform(0.05, 1.0))
    P0, P1 = (float(p) for p in rng.uniform(low, cfg.Pmax, size=2))
    return beta, P0, P1


class DeterminantChainSuite(ValidationSuite):
    name = "determinant-chain"
    description = "log-det rate of the DFT mapping matrix equals the closed-form relay rate"

    def __init__(self, instances: int = 200, max_dim: int = 8, rtol: float = 1e-9):
        self.instances = instances
        self.max_dim = max_dim
        self.rtol = rtol

    def execute(self, rng: np.random.Generator) -> CheckResult:
        base = default_config()
        chan = channel_gains(base)
        worst = 0.0
        for _ in range(self.instances):
            M, N = (int(x) for x in rng.integers(1, self.max_dim + 1, size=2))
            cfg = base.with_updates(L=M + N)
            beta, P0, P1 = _random_powers(rng, cfg)
            alloc = Allocation(M=M, N=N, P0=P0, P1=P1, beta=beta)
            closed = rate_relay_combined(alloc, chan, cfg)
            numeric = numeric_logdet_rate(build_mapping_matrix(M, N), beta, P0, P1, chan, cfg)
            worst = max(worst, _rel(numeric, closed))
        return self.verdict(
            worst <= self.rtol,
            f"max relative error {worst:.3e} over {self.instances} instances",
            max_rel_error=worst,
        )


class EigenOptimalitySuite(ValidationSuite):
    name = "eigen-optimality"
    description = "brute-force eigenvalue search lands on the uniform profile"

    def __init__(self, pairs: int = 20, dims: Sequence[Tuple[int, float]] = ((2, 0.05), (3, 0.1))):
        self.pairs = pairs
        self.dims = list(dims)

    def execute(self, rng: np.random.Generator) -> CheckResult:
        base = default_config()
        chan = channel_gains(base)
        failures = []
        worst = 0.0
        for k, step in self.dims:
            M, N = k, 2 * k
            cfg = base.with_updates(L=M + N)
            uniform = np.asarray(optimal_eigenvalues(M, N).values)
            for _ in range(self.pairs):
                beta, P0, P1 = _random_powers(rng, cfg, low=0.1)
                profile, _ = brute_force_eigen_search(M, N, beta, P0, P1, chan, cfg, step)
                dist = float(np.max(np.abs(np.asarray(profile.values) - uniform)))
                worst = max(worst, dist / step)
                if dist > step + 1e-12:
                    failures.append(f"k={k}: profile {profile.values} is {dist:.3g} from uniform")
        return self.verdict(
            not failures,
            failures[0] if failures else f"worst distance {worst:.2f} grid steps",
            failures=failures,
        )


class ReductionSuite(ValidationSuite):
    name = "reductions"
    description = "equal-time special case and the upper-bound case classification"

    def __init__(self, instances: int = 1000, max_dim: int = 10, rtol: float = 1e-12):
        self.instances = instances
        self.max_dim = max_dim
        self.rtol = rtol

    def execute(self, rng: np.random.Generator) -> CheckResult:
        base = default_config()
        chan = channel_gains(base)
        failures = []

        for _ in range(self.instances):
            M = int(rng.integers(1, self.max_dim + 1))
            cfg = base.with_updates(L=2 * M)
            beta, P0, P1 = _random_powers(rng, cfg)
            alloc = Allocation(M=M, N=M, P0=P0, P1=P1, beta=beta)
            got = rate_sum(alloc, chan, cfg).r_sum
            ref = equal_time_reference(chan, cfg, beta, P0, P1)
            if abs(got - ref) > self.rtol * max(abs(ref), 1e-300):
                failures.append(f"M=N={M}: rate_sum {got} != equal-time {ref}")

        tol = 1e-9
        for _ in range(self.instances):
            M, N = (int(x) for x in rng.integers(1, self.max_dim + 1, size=2))
            cfg = base.with_updates(L=M + N)
            beta, P0, P1 = _random_powers(rng, cfg)
            alloc = Allocation(M=M, N=N, P0=P0, P1=P1, beta=beta)
            breakdown = rate_sum(alloc, chan, cfg)
            upper = rate_sum_upper(alloc, chan, cfg)
            scale = max(1.0, abs(upper))
            if upper < breakdown.r_sum - tol * scale:
                failures.append(f"M={M}, N={N}: upper {upper} < achievable {breakdown.r_sum}")
            predicted = classify_case(breakdown)
            if predicted.relation == "=" and abs(upper - breakdown.r_sum) > tol * scale:
                failures.append(
                    f"M={M}, N={N}: {predicted.case.value} predicts equality, "
                    f"got {upper} vs {breakdown.r_sum}"
                )

        return self.verdict(
            not failures,
            failures[0] if failures else f"{2 * self.instances} instances consistent",
            failures=failures[:20],
        )


class SurrogateSuite(ValidationSuite):
    name = "surrogates"
    description = "SCA surrogates touch, are tangent to and bound the original functions"

    def __init__(
        self,
        points: int = 50,
        neighbours: int = 10_000,
        value_rtol: float = 1e-12,
        grad_rtol: float = 1e-4,
    ):
        self.points = points
        self.neighbours = neighbours
        self.value_rtol = value_rtol
        self.grad_rtol = grad_rtol

    @staticmethod
    def _central(fun, x: np.ndarray) -> np.ndarray:
        grad = np.zeros_like(x)
        for i in range(len(x)):
            h = 1e-6 * max(1.0, abs(x[i]))
            step = np.zeros_like(x)
            step[i] = h
            grad[i] = (fun(*(x + step)) - fun(*(x - step))) / (2.0 * h)
        return grad

    def _grad_error(self, analytic: np.ndarray, fun, x: np.ndarray) -> float:
        fd = self._central(fun, x)
        return float(np.max(np.abs(analytic - fd)) / max(1.0, np.max(np.abs(fd))))

    def execute(self, rng: np.random.Generator) -> CheckResult:
        cfg = default_config()
        chan = channel_gains(cfg)
        p0_min = min_backscatter_power(chan, cfg)
        failures: List[str] = []
        worst_value = worst_grad = 0.0

        for _ in range(self.points):
            rho_j = float(rng.uniform(0.55, 0.95))
            P0 = float(rng.uniform(1.05 * p0_min, cfg.Pmax))
            P1 = float(rng.uniform(0.5, cfg.Pmax))
            a_j, b_j = (1.0 - rho_j) * P0, (1.0 - rho_j) * P1
            pt = surrogate_point(rho_j, a_j, b_j, chan, cfg)
            sur = sca_surrogates(pt, chan, cfg)
            fns = ScaFunctions(sur.consts)

            values = [
                ("y", sur.y_lb(rho_j), fns.y(rho_j)),
                ("f", sur.f_ub(rho_j, b_j), fns.f(rho_j, b_j)),
                ("g", sur.g_lb(rho_j, a_j), fns.g(rho_j, a_j)),
                ("w", sur.w_lb(rho_j, a_j), fns.w(rho_j, a_j)),
            ]
            for label, approx, exact in values:
                err = _rel(float(approx), float(exact))
                worst_value = max(worst_value, err)
                if err > self.value_rtol:
                    failures.append(f"{label} surrogate misses the point at rho={rho_j:.4f}")

            grads = [
                ("y", sur.y_lb_grad(rho_j)[[0]], fns.y, np.array([rho_j])),
                ("f", sur.f_ub_grad(rho_j, b_j)[[0, 2]], fns.f, np.array([rho_j, b_j])),
                ("g", sur.g_lb_grad(rho_j, a_j)[:2], fns.g, np.array([rho_j, a_j])),
                ("w", sur.w_lb_grad(rho_j, a_j)[:2], fns.w, np.array([rho_j, a_j])),
            ]
            for label, analytic, fun, x in grads:
                err = self._grad_error(analytic, fun, x)
                worst_grad = max(worst_grad, err)
                if err > self.grad_rtol:
                    failures.append(f"{label} gradient off by {err:.2e} at rho={rho_j:.4f}")

            rho = rng.uniform(0.51, 0.99, size=self.neighbours)
            a = (1.0 - rho) * rng.uniform(p0_min, cfg.Pmax, size=self.neighbours)
            b = (1.0 - rho) * rng.uniform(0.0, cfg.Pmax, size=self.neighbours)
            bounds = [
                ("y", fns.y(rho) - sur.y_lb(rho), fns.y(rho)),
                ("f", sur.f_ub(rho, b) - fns.f(rho, b), fns.f(rho, b)),
                ("g", fns.g(rho, a) - sur.g_lb(rho, a), fns.g(rho, a)),
                ("w", fns.w(rho, a) - sur.w_lb(rho, a), fns.w(rho, a)),
            ]
            for label, slack, ref in bounds:
                bad = int(np.sum(slack < -1e-9 * np.maximum(1.0, np.abs(ref))))
                if bad:
                    failures.append(f"{label} bound fails at {bad} neighbours of rho={rho_j:.4f}")

        return self.verdict(
            not failures,
            failures[0]
            if failures
            else f"value error {worst_value:.1e}, gradient error {worst_grad:.1e}",
            max_value_error=worst_value,
            max_grad_error=worst_grad,
            failures=failures[:20],
        )


class ScaConvergenceSuite(ValidationSuite):
    name = "sca-convergence"
    description = "SCA from the default start is monotone and converges quickly"

    def __init__(self, peak_powers: Sequence[float] = (20.0, 30.0), max_iterations: int = 10):
        self.peak_powers = list(peak_powers)
        self.max_iterations = max_iterations

    def execute(self, rng: np.random.Generator) -> CheckResult:
        opts = SolverOptions(rho0=0.7, a0=6.0)
        failures = []
        iterations = {}
        for Pmax in self.peak_powers:
            cfg = default_config(alpha1=2.5, Pmax=Pmax)
            sol = solve_case1_highrho(channel_gains(cfg), cfg, opts)
            ts = [step.t for step in sol.sca_trace]
            iterations[Pmax] = sol.iterations
            if any(b < a - 1e-9 * max(1.0, abs(a)) for a, b in zip(ts, ts[1:])):
                failures.append(f"Pmax={Pmax}: t decreased along the trace {ts}")
            if sol.iterations > self.max_iterations:
                failures.append(f"Pmax={Pmax}: {sol.iterations} iterations")
        return self.verdict(
            not failures,
            failures[0] if failures else f"iterations per Pmax: {iterations}",
            iterations=iterations,
        )


class ConstraintAuditSuite(ValidationSuite):
    name = "constraint-audit"
    description = "allocations are feasible with the budget and circuit constraints tight"

    def __init__(
        self,
        alpha1_values: Sequence[float] = (2.5, 3.0, 3.5, 4.0),
        peak_powers: Sequence[float] = (20.0, 30.0),
    ):
        self.alpha1_values = list(alpha1_values)
        self.peak_powers = list(peak_powers)

    def execute(self, rng: np.random.Generator) -> CheckResult:
        failures = []
        for Pmax in self.peak_powers:
            for alpha1 in self.alpha1_values:
                cfg = default_config(alpha1=alpha1, Pmax=Pmax)
                chan = channel_gains(cfg)
                for problem in audit_report(allocate(chan, cfg), chan, cfg):
                    failures.append(f"alpha1={alpha1}, Pmax={Pmax}: {problem}")
        count = len(self.alpha1_values) * len(self.peak_powers)
        return self.verdict(
            not failures,
            failures[0] if failures else f"{count} allocations pass",
            failures=failures,
        )


class OracleDominanceSuite(ValidationSuite):
    name = "oracle-dominance"
    description = "exhaustive search never loses and the solver stays close to it"
    slow = True

    def __init__(
        self,
        alpha1_values: Optional[Sequence[float]] = None,
        peak_powers: Sequence[float] = (20.0, 30.0),
        ratio: float = 0.95,
        share: float = 0.8,
    ):
        self.alpha1_values = list(alpha1_values or ALPHA1_SWEEP)
        self.peak_powers = list(peak_powers)
        self.ratio = ratio
        self.share = share

    def execute(self, rng: np.random.Generator) -> CheckResult:
        failures = []
        close = total = 0
        for Pmax in self.peak_powers:
            for alpha1 in self.alpha1_values:
                cfg = default_config(alpha1=alpha1, Pmax=Pmax)
                chan = channel_gains(cfg)
                proposed = allocate(chan, cfg)
                oracle = exhaustive_allocate(chan, cfg)
                total += 1
                if proposed.throughput > oracle.throughput * (1.0 + 1e-6):
                    failures.append(
                        f"alpha1={alpha1}, Pmax={Pmax}: solver {proposed.throughput} "
                        f"beats oracle {oracle.throughput}"
                    )
                if proposed.throughput >= self.ratio * oracle.throughput:
                    close += 1
                failures.extend(
                    f"alpha1={alpha1}, Pmax={Pmax}: {p}" for p in audit_report(proposed, chan, cfg)
                )
        if close < self.share * total:
            failures.append(f"only {close}/{total} points within {self.ratio:.0%} of the oracle")
        return self.verdict(
            not failures,
            failures[0] if failures else f"{close}/{total} points within {self.ratio:.0%}",
            close=close,
            total=total,
            failures=failures[:20],
        )


class GapTrendSuite(ValidationSuite):
    name = "gap-trend"
    description = "the rounding gap does not grow with the number of subframes"
    slow = True

    def __init__(
        self,
        settings: Sequence[Tuple[float, float]] = (
            (3.9, 20.0),
            (4.0, 20.0),
            (2.6, 30.0),
            (2.9, 30.0),
        ),
        L_values: Sequence[int] = tuple(range(20, 101, 10)),
    ):
        self.settings = list(settings)
        self.L_values = list(L_values)

    def execute(self, rng: np.random.Generator) -> CheckResult:
        failures = []
        slopes = {}
        for alpha1, Pmax in self.settings:
            cfg = default_config(alpha1=alpha1, Pmax=Pmax)
            gaps = timesharing_gap(channel_gains(cfg), cfg, self.L_values)
            points = [p for p in gaps if p.gap is not None]
            if len(points) < 2:
                failures.append(f"alpha1={alpha1}, Pmax={Pmax}: fewer than two gap points")
                continue
            slope = float(np.polyfit([p.L for p in points], [p.gap for p in points], 1)[0])
            slopes[f"{alpha1}/{Pmax}"] = slope
            if slope > 1e-9:
                failures.append(f"alpha1={alpha1}, Pmax={Pmax}: gap slope {slope:.3e} > 0")
        return self.verdict(
            not failures, failures[0] if failures else f"slopes {slopes}", slopes=slopes
        )


def _nonincreasing(values: Sequence[float], rtol: float = 1e-6) -> bool:
    return all(b <= a + rtol * max(1.0, abs(a)) for a, b in zip(values, values[1:]))


class SchemeOrderingSuite(ValidationSuite):
    name = "scheme-ordering"
    description = "the proposed scheme dominates the fixed schemes and sits below the related bound"
    slow = True

    def execute(self, rng: np.random.Generator) -> CheckResult:
        failures = []
        rtol = 1e-6

        frame = rows_frame(run_sweep(preset_spec(Preset.FIG5)))
        frame = frame[frame["status"] == "ok"]
        for value, group in frame.groupby("value"):
            best = group[group["scheme"] == SchemeId.PROPOSED.value]["throughput_bits"]
            if best.empty:
                failures.append(f"alpha1={value}: proposed scheme failed")
                continue
            ours = float(best.iloc[0])
            for _, row in group[group["scheme"] != SchemeId.PROPOSED.value].iterrows():
                if row["throughput_bits"] > ours * (1.0 + rtol):
                    failures.append(f"alpha1={value}: {row['scheme']} beats the proposed scheme")
        for scheme, group in frame.groupby("scheme"):
            if not _nonincreasing(group.sort_values("value")["throughput_bits"].tolist()):
                failures.append(f"{scheme} throughput increases with alpha1")

        frame = rows_frame(run_sweep(preset_spec(Preset.FIG6)))
        frame = frame[(frame["status"] == "ok") & (frame["L"] == 1000)]
        for value, group in frame.groupby("value"):
            upper = group[group["scheme"] == SchemeId.RELATED_UPPER.value]["throughput_bits"]
            ours = group[
                (group["scheme"] == SchemeId.PROPOSED.value)
                & (group["kind"] == RowKind.ALLOCATION.value)
            ]["throughput_bits"]
            if upper.empty or ours.empty:
                failures.append(f"alpha1={value}: missing L=1000 result")
            elif float(upper.iloc[0]) < float(ours.iloc[0]) * (1.0 - rtol):
                failures.append(f"alpha1={value}: related bound below the proposed scheme")

        return self.verdict(
            not failures,
            failures[0] if failures else "orderings and trends hold",
            failures=failures[:20],
        )


class SubframeTrendSuite(ValidationSuite):
    name = "subframe-trend"
    description = "relay subframes do not shrink as the direct link weakens"
    slow = True

    def execute(self, rng: np.random.Generator) -> CheckResult:
        frame = rows_frame(run_sweep(preset_spec(Preset.FIG8)))
        rows = frame[(frame["status"] == "ok") & (frame["kind"] == RowKind.ALLOCATION.value)]
        relay = rows.sort_values("value")["N"].astype(int).tolist()
        ok = all(b >= a for a, b in zip(relay, relay[1:]))
        return self.verdict(ok, f"N over alpha1: {relay}", relay_subframes=relay)


def default_registry() -> SuiteRegistry:
    """All suites, fast ones first."""
    registry = SuiteRegistry()
    for suite in (
        DeterminantChainSuite(),
        EigenOptimalitySuite(),
        ReductionSuite(),
        SurrogateSuite(),
        ScaConvergenceSuite(),
        ConstraintAuditSuite(),
        OracleDominanceSuite(),
        GapTrendSuite(),
        SchemeOrderingSuite(),
        SubframeTrendSuite(),
    ):
        registry.register(suite)
    return registry
