import numpy as np
import pytest

from relaybc.allocator.forms import LinkConstants
from relaybc.experiments import SchemeId, evaluate_scheme, scheme_throughput


@pytest.fixture
def results(chan, cfg):
    return {s: evaluate_scheme(s, chan, cfg) for s in SchemeId}


def test_bc_only(results, cfg):
    bc = results[SchemeId.BC_ONLY]
    assert (bc.allocation.M, bc.allocation.N) == (cfg.L, 0)
    assert bc.P0 == cfg.P
    assert bc.discrete


def test_relay_fixed_equal_split(results, cfg):
    fixed = results[SchemeId.RELAY_BC_FIXED]
    assert (fixed.allocation.M, fixed.allocation.N) == (10, 10)
    assert fixed.note == ""


def test_relay_fixed_odd_block(chan, cfg):
    fixed = evaluate_scheme(SchemeId.RELAY_BC_FIXED, chan, cfg.with_updates(L=21))
    assert (fixed.allocation.M, fixed.allocation.N) == (10, 11)
    assert fixed.note == "odd L: M=floor(L/2)=10"


def test_opportunistic_picks_better_mode(results):
    opp = results[SchemeId.OPPORTUNISTIC]
    bc, fixed = results[SchemeId.BC_ONLY], results[SchemeId.RELAY_BC_FIXED]
    assert opp.throughput == pytest.approx(max(bc.throughput, fixed.throughput))
    assert opp.note.startswith("mode=relay" if fixed.throughput > bc.throughput else "mode=direct")
    assert opp.scheme == SchemeId.OPPORTUNISTIC


def test_scheme_ordering(results):
    proposed = results[SchemeId.PROPOSED].throughput
    assert proposed >= results[SchemeId.BC_ONLY].throughput
    assert proposed >= results[SchemeId.RELAY_BC_FIXED].throughput * (1.0 - 1e-9)
    assert results[SchemeId.EXHAUSTIVE].throughput >= proposed * (1.0 - 1e-9)
    assert results[SchemeId.RELATED_UPPER].throughput >= proposed * (1.0 - 1e-9)


def test_related_upper_is_continuous(results):
    upper = results[SchemeId.RELATED_UPPER]
    assert not upper.discrete
    assert 0.0 < upper.rho <= 1.0


def test_related_upper_beats_split_grid(results, chan, cfg):
    # P = Pmax, so both powers at peak fit the budget at every split
    k = LinkConstants.build(chan, cfg)
    rho = np.linspace(0.1 / cfg.L, 1.0, 400)
    sd = rho * np.log2(k.B + k.k_sd * cfg.Pmax)
    sr = rho * np.log2(k.A + k.k_sr * cfg.Pmax)
    rd = (1.0 - rho) * np.log2(1.0 + k.k_rd * cfg.Pmax)
    grid_best = cfg.tsw * float(np.max(np.maximum(sd, np.minimum(sr, sd + rd))))

    upper = results[SchemeId.RELATED_UPPER]
    assert upper.throughput >= grid_best * (1.0 - 1e-9)
    assert upper.throughput >= results[SchemeId.PROPOSED].throughput
    assert upper.note.endswith("relayed branch")


def test_proposed_carries_solver_details(results):
    proposed = results[SchemeId.PROPOSED]
    assert proposed.case == "case1-highrho"
    assert proposed.rule in ("condition1", "condition2")
    assert proposed.sca_trace


def test_scheme_throughput_accepts_names(chan, cfg):
    assert scheme_throughput("bc-only", chan, cfg) == pytest.approx(
        evaluate_scheme(SchemeId.BC_ONLY, chan, cfg).throughput
    )
