import numpy as np
import pytest

from relaybc.core import KernelDomainError, NumericError
from relaybc.kernel import (
    ConcaveProgram,
    ConvexConstraint,
    KernelOptions,
    KernelStatus,
    bisect_decreasing,
    central_gradient,
    max_violation,
    maximize_concave,
    maximize_unimodal,
    verify_gradients,
)


def _budget(limit):
    return ConvexConstraint(
        "budget", lambda x: x[0] + x[1] - limit, lambda x: np.array([1.0, 1.0])
    )


def test_projection_onto_halfspace():
    prog = ConcaveProgram(
        dim=2,
        objective=lambda x: -((x[0] - 1.0) ** 2) - (x[1] - 2.0) ** 2,
        gradient=lambda x: np.array([-2.0 * (x[0] - 1.0), -2.0 * (x[1] - 2.0)]),
        lower=[0.0, 0.0],
        upper=[3.0, 3.0],
        constraints=(_budget(2.0),),
    )
    res = maximize_concave(prog)
    assert res.ok
    assert res.x == pytest.approx([0.5, 1.5], abs=1e-4)
    assert res.objective == pytest.approx(-0.5, abs=1e-6)
    assert res.max_violation <= 1e-7


def test_water_filling_pair():
    prog = ConcaveProgram(
        dim=2,
        objective=lambda x: float(np.sum(np.log1p(x))),
        gradient=lambda x: 1.0 / (1.0 + x),
        lower=[0.0, 0.0],
        upper=[10.0, 10.0],
        constraints=(_budget(2.0),),
        start=[0.1, 0.1],
    )
    res = maximize_concave(prog)
    assert res.status in (KernelStatus.OPTIMAL, KernelStatus.MAX_ITER)
    assert res.objective == pytest.approx(2.0 * np.log(2.0), rel=1e-6)


def test_unconstrained_box_maximum():
    prog = ConcaveProgram(
        dim=1,
        objective=lambda x: float(x[0]),
        gradient=lambda x: np.array([1.0]),
        lower=[0.0],
        upper=[4.0],
    )
    res = maximize_concave(prog)
    assert res.x[0] == pytest.approx(4.0, rel=1e-6)
    assert res.status == KernelStatus.OPTIMAL


def test_infeasible_program_is_reported_not_raised():
    prog = ConcaveProgram(
        dim=1,
        objective=lambda x: float(x[0]),
        gradient=lambda x: np.array([1.0]),
        lower=[0.0],
        upper=[1.0],
        constraints=(ConvexConstraint("floor", lambda x: 5.0 - x[0], lambda x: np.array([-1.0])),),
    )
    res = maximize_concave(prog)
    assert res.status == KernelStatus.INFEASIBLE
    assert not res.ok
    assert max_violation(prog, res.x) > 0.0


def test_bad_box_raises():
    prog = ConcaveProgram(
        dim=2,
        objective=lambda x: 0.0,
        gradient=lambda x: np.zeros(2),
        lower=[1.0, 0.0],
        upper=[0.0, 1.0],
    )
    with pytest.raises(KernelDomainError):
        maximize_concave(prog)
    with pytest.raises(KernelDomainError):
        maximize_concave(
            ConcaveProgram(
                dim=2,
                objective=lambda x: 0.0,
                gradient=lambda x: np.zeros(2),
                lower=[0.0],
                upper=[1.0],
            )
        )


def test_gradient_check():
    good = ConcaveProgram(
        dim=2,
        objective=lambda x: -float(x @ x),
        gradient=lambda x: -2.0 * x,
        lower=[-1.0, -1.0],
        upper=[1.0, 1.0],
    )
    verify_gradients(good, np.array([0.3, -0.2]))
    bad = ConcaveProgram(
        dim=2,
        objective=lambda x: -float(x @ x),
        gradient=lambda x: -x,
        lower=[-1.0, -1.0],
        upper=[1.0, 1.0],
    )
    with pytest.raises(NumericError):
        verify_gradients(bad, np.array([0.3, -0.2]))
    with pytest.raises(NumericError):
        maximize_concave(bad, KernelOptions(check_gradients=True))
    assert maximize_concave(good, KernelOptions(check_gradients=True)).ok


def test_central_gradient():
    grad = central_gradient(lambda x: float(np.sum(x**3)), np.array([1.0, 2.0]))
    assert grad == pytest.approx([3.0, 12.0], rel=1e-6)


def test_bisect_decreasing():
    assert bisect_decreasing(lambda r: 2.0 - r, 0.0, 5.0, 1e-12) == pytest.approx(2.0)
    assert bisect_decreasing(lambda r: -1.0 - r, 0.0, 5.0, 1e-12) == 0.0
    assert bisect_decreasing(lambda r: 10.0 - r, 0.0, 5.0, 1e-12) == 5.0
    with pytest.raises(KernelDomainError):
        bisect_decreasing(lambda r: -r, 1.0, 1.0, 1e-12)


def test_polish_reaches_active_faces():
    prog = ConcaveProgram(
        dim=2,
        objective=lambda x: float(np.log1p(x[0]) + np.log1p(2.0 * x[1])),
        gradient=lambda x: np.array([1.0 / (1.0 + x[0]), 2.0 / (1.0 + 2.0 * x[1])]),
        lower=[0.0, 0.0],
        upper=[10.0, 10.0],
        constraints=(_budget(3.0),),
    )
    res = maximize_concave(prog)
    # water level: 1 + x0 = 0.5 + x1, x0 + x1 = 3
    assert res.x == pytest.approx([1.25, 1.75], rel=1e-6)
    assert res.objective == pytest.approx(np.log(2.25) + np.log(4.5), rel=1e-6)

    rough = maximize_concave(prog, KernelOptions(polish=False))
    assert res.objective >= rough.objective


def test_maximize_unimodal():
    x, value = maximize_unimodal(lambda r: -((r - 0.3) ** 2), 0.0, 1.0, 1e-10)
    assert x == pytest.approx(0.3, abs=1e-8)
    assert value == pytest.approx(0.0, abs=1e-12)
    assert maximize_unimodal(lambda r: r, 0.0, 2.0)[0] == 2.0
    assert maximize_unimodal(lambda r: -r, 0.5, 0.5) == (0.5, -0.5)
    with pytest.raises(KernelDomainError):
        maximize_unimodal(lambda r: r, 1.0, 0.0)
