import pytest

from relaybc.allocator import optimal_beta
from relaybc.core import (
    Allocation,
    ConstraintViolationError,
    check_constraints,
    default_config,
    raise_for_violations,
)


def _names(violations):
    return {v.constraint for v in violations}


def test_random_feasible_allocations_pass(draw_allocation, chan, cfg):
    for _ in range(50):
        assert check_constraints(draw_allocation(), chan, cfg) == []


def test_full_budget_at_peak_passes(chan, cfg):
    alloc = Allocation(
        M=12, N=8, P0=20.0, P1=20.0, beta=optimal_beta(20.0, chan, cfg), eigenvalues=[1.0] * 8
    )
    assert check_constraints(alloc, chan, cfg) == []


@pytest.mark.parametrize(
    "changes, expected",
    [
        ({"beta": 1.0}, "C2"),
        ({"N": 9}, "C3"),
        ({"eigenvalues": [1.0] * 7}, "C5"),
        ({"eigenvalues": [2.0] * 8}, "C5"),
        ({"P0": 25.0}, "C6"),
        ({"beta": -0.1}, "C7"),
    ],
)
def test_single_violations(chan, cfg, changes, expected):
    data = dict(M=12, N=8, P0=20.0, P1=20.0, beta=optimal_beta(20.0, chan, cfg))
    data["eigenvalues"] = [1.0] * 8
    data.update(changes)
    assert expected in _names(check_constraints(Allocation(**data), chan, cfg))


def test_budget_violation(chan):
    cfg = default_config(P=10.0)
    alloc = Allocation(
        M=10, N=10, P0=20.0, P1=20.0, beta=optimal_beta(20.0, chan, cfg), eigenvalues=[1.0] * 10
    )
    violations = check_constraints(alloc, chan, cfg)
    assert _names(violations) == {"C1"}
    assert violations[0].slack < 0.0


def test_negative_counts(chan, cfg):
    alloc = Allocation(M=-1, N=21, P0=10.0, P1=10.0, beta=0.5)
    assert "C4" in _names(check_constraints(alloc, chan, cfg))


def test_idle_backscatter_skips_mapping_check(chan, cfg):
    alloc = Allocation(M=0, N=20, P0=0.0, P1=0.0, beta=0.0, eigenvalues=[])
    assert check_constraints(alloc, chan, cfg) == []


def test_raise_for_violations(chan, cfg):
    raise_for_violations([])
    alloc = Allocation(M=12, N=8, P0=30.0, P1=20.0, beta=1.0, eigenvalues=[1.0] * 8)
    with pytest.raises(ConstraintViolationError) as err:
        raise_for_violations(check_constraints(alloc, chan, cfg))
    assert {"C2", "C6"} <= {v.constraint for v in err.value.violations}
