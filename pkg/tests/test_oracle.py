import pandas as pd
import pytest

from relaybc.allocator import allocate
from relaybc.core import (
    AllocationInfeasibleError,
    InfeasibleStage,
    SearchSpaceError,
    channel_gains,
)
from relaybc.oracle import exhaustive_allocate, timesharing_gap


def test_exhaustive_candidate_table(chan, cfg):
    report = exhaustive_allocate(chan, cfg)
    rows = report.candidates
    assert [r.M for r in rows] == list(range(cfg.L + 1))
    assert rows[0].status == "idle" and rows[0].throughput == 0.0
    assert all(r.status == "ok" for r in rows[1:])

    best = max(r.throughput for r in rows)
    assert report.throughput == pytest.approx(best)
    assert report.allocation.M == min(r.M for r in rows if r.throughput == best)


@pytest.mark.slow
def test_exhaustive_dominates_proposed(chan, cfg):
    for L in (10, 17):
        scenario = cfg.with_updates(L=L)
        oracle = exhaustive_allocate(chan, scenario)
        proposed = allocate(chan, scenario)
        assert oracle.throughput >= proposed.throughput * (1.0 - 1e-9)


def test_exhaustive_threads_agree(chan, cfg):
    serial = exhaustive_allocate(chan, cfg)
    pooled = exhaustive_allocate(chan, cfg, threads=4)
    assert pooled.candidates == serial.candidates
    assert pooled.allocation == serial.allocation


def test_candidates_csv(tmp_path, chan, cfg):
    path = tmp_path / "candidates.csv"
    exhaustive_allocate(chan, cfg).write_candidates_csv(str(path))
    frame = pd.read_csv(path)
    assert len(frame) == cfg.L + 1
    assert {"M", "N", "status", "throughput", "P0", "P1", "beta"} <= set(frame.columns)


def test_exhaustive_enumeration_guard(cfg):
    big = cfg.with_updates(L=1001)
    with pytest.raises(SearchSpaceError):
        exhaustive_allocate(channel_gains(big), big)


def test_exhaustive_all_splits_infeasible(cfg):
    hungry = cfg.with_updates(Pc=2e-2)
    with pytest.raises(AllocationInfeasibleError) as info:
        exhaustive_allocate(channel_gains(hungry), hungry)
    assert info.value.stage == InfeasibleStage.ORACLE
    assert all(r.status in ("idle", "reoptimize") for r in info.value.details)


@pytest.mark.slow
def test_timesharing_gap(chan, cfg):
    points = timesharing_gap(chan, cfg, [20, 30])
    assert [p.L for p in points] == [20, 30]
    for p in points:
        assert p.status == "ok"
        assert p.gap == pytest.approx(p.oracle - p.proposed)
        assert p.gap >= -1e-9 * p.oracle


def test_timesharing_gap_reports_failures(cfg):
    hungry = cfg.with_updates(Pc=2e-2)
    points = timesharing_gap(channel_gains(hungry), hungry, [20])
    assert points[0].status == "prc"
    assert points[0].gap is None


def test_timesharing_gap_needs_lengths(chan, cfg):
    with pytest.raises(ValueError):
        timesharing_gap(chan, cfg, [])
