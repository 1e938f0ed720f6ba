import pytest
import yaml
from pydantic import ValidationError

from relaybc.core import ConfigError, CsvFormatError
from relaybc.experiments import (
    CSV_COLUMNS,
    Preset,
    RowKind,
    RunMetrics,
    SchemeId,
    SchemeRun,
    SweepAxis,
    SweepSpec,
    audit_csv,
    load_sweep_spec,
    point_config,
    preset_spec,
    read_csv,
    run_sweep,
    sweep_points,
    write_csv,
)


@pytest.fixture
def small_spec():
    return SweepSpec(
        axis=SweepAxis(name="alpha1", values=[2.8, 3.0]),
        runs=[SchemeRun(scheme=SchemeId.PROPOSED), SchemeRun(scheme=SchemeId.BC_ONLY)],
    )


@pytest.mark.parametrize("preset", list(Preset))
def test_presets_build(preset):
    spec = preset_spec(preset)
    assert spec.preset == preset
    assert point_config(spec, spec.axis.values[0] if spec.axis.values else None)


def test_related_presets_require_geometry():
    with pytest.raises(ValidationError):
        SweepSpec(preset=Preset.FIG5, axis=SweepAxis(name="alpha1", values=[3.0]))
    spec = preset_spec(Preset.FIG6)
    assert {run.L for run in spec.runs} == {20, 1000}


@pytest.mark.parametrize("values", [[3.0, 2.5], [2.5, float("nan")]])
def test_axis_values_validated(values):
    with pytest.raises(ValidationError):
        SweepAxis(name="alpha1", values=values)


def test_point_config_axes():
    spec = preset_spec(Preset.FIG7)
    assert point_config(spec, 30.0, 20.0).coord_r == (30.0, 20.0)
    assert len(sweep_points(spec)) == 9 * 4

    spec = SweepSpec(axis=SweepAxis(name="L", values=[35.0]), overrides={"E": 0.1})
    cfg = point_config(spec, 35.0)
    assert cfg.L == 35
    assert cfg.P == pytest.approx(10.0)
    assert point_config(spec, 35.0, L=50).L == 50


def test_preset_grid_sizes():
    fig3 = preset_spec(Preset.FIG3)
    assert len(sweep_points(fig3)) == 16 * 2
    assert {point_config(fig3, 3.0, p).Pmax for p in fig3.axis2.values} == {20.0, 30.0}

    fig4 = preset_spec(Preset.FIG4)
    assert len(sweep_points(fig4)) == 9 * 4
    pairs = {(c.alpha1, c.Pmax) for c in (point_config(fig4, 20.0, a) for a in fig4.axis2.values)}
    assert pairs == {(3.9, 20.0), (4.0, 20.0), (2.6, 30.0), (2.9, 30.0)}
    # CSV round-trip values still find their pair
    assert point_config(fig4, 50.0, 2.9000000000001).Pmax == 30.0
    with pytest.raises(ConfigError):
        point_config(fig4, 50.0, 3.0)


def test_paired_axis_lengths_validated():
    with pytest.raises(ValidationError):
        SweepAxis(name="alpha1", values=[2.6, 2.9], paired={"Pmax": [30.0]})


def test_point_config_unknown_axis():
    spec = SweepSpec(axis=SweepAxis(name="colour", values=[1.0]))
    with pytest.raises(ConfigError):
        point_config(spec, 1.0)


def test_run_sweep_rows(small_spec):
    metrics = RunMetrics()
    rows = run_sweep(small_spec, metrics=metrics)
    assert [(r.value, r.scheme) for r in rows] == [
        (2.8, "proposed"),
        (2.8, "bc-only"),
        (3.0, "proposed"),
        (3.0, "bc-only"),
    ]
    assert all(r.kind == RowKind.ALLOCATION and r.status == "ok" for r in rows)
    assert all(r.M + r.N == r.L for r in rows)
    assert audit_csv(rows, small_spec) == []
    assert metrics.get_stats("points")["total"] == 2
    assert metrics.get_stats("solve_ms")["count"] == 4


def test_sweep_csv_is_reproducible(tmp_path, small_spec):
    serial, pooled = tmp_path / "serial.csv", tmp_path / "pooled.csv"
    write_csv(run_sweep(small_spec), str(serial))
    write_csv(run_sweep(small_spec, threads=2), str(pooled))
    assert serial.read_bytes() == pooled.read_bytes()
    assert serial.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)


def test_csv_round_trip(tmp_path, small_spec):
    rows = run_sweep(small_spec)
    path = tmp_path / "sweep.csv"
    write_csv(rows, str(path))
    back = read_csv(str(path))
    assert len(back) == len(rows)
    for original, parsed in zip(rows, back):
        assert parsed.scheme == original.scheme
        assert parsed.M == original.M
        assert parsed.throughput_bits == pytest.approx(original.throughput_bits, rel=1e-11)
        assert parsed.axis2 == ""
    assert audit_csv(back, small_spec) == []


def test_empty_axis_writes_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_csv(run_sweep(preset_spec(Preset.CUSTOM)), str(path))
    assert path.read_text().strip() == ",".join(CSV_COLUMNS)
    assert read_csv(str(path)) == []


def test_read_csv_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_csv(str(tmp_path / "missing.csv"))
    bad = tmp_path / "bad.csv"
    bad.write_text("preset,kind\ncustom,allocation\n")
    with pytest.raises(CsvFormatError):
        read_csv(str(bad))


def test_infeasible_points_become_rows(small_spec):
    spec = small_spec.model_copy(update={"overrides": {"Pc": 2e-2}})
    rows = run_sweep(spec)
    assert len(rows) == 4
    assert {r.status for r in rows} == {"prc"}
    assert all(r.throughput_bits is None for r in rows)


def test_trace_rows():
    spec = SweepSpec(
        axis=SweepAxis(name="Pmax", values=[20.0]),
        overrides={"alpha1": 2.5},
        trace=True,
    )
    rows = run_sweep(spec)
    assert rows[0].kind == RowKind.ALLOCATION
    trace = [r for r in rows if r.kind == RowKind.TRACE]
    assert trace and trace[0].iterations == 0
    assert [r.iterations for r in trace] == list(range(len(trace)))


@pytest.mark.slow
def test_gap_rows():
    spec = SweepSpec(axis=SweepAxis(name="L", values=[20.0]), runs=[], gap=True)
    (row,) = run_sweep(spec)
    assert row.kind == RowKind.GAP
    assert row.status == "ok"
    assert row.gap_bits >= -1e-9 * row.throughput_bits
    assert row.note.startswith("oracle_bits=")


def test_load_sweep_spec(tmp_path):
    path = tmp_path / "sweep.yaml"
    path.write_text(
        yaml.dump({"axis": {"name": "alpha1", "values": [3.0]}, "runs": [{"scheme": "bc-only"}]})
    )
    spec = load_sweep_spec(str(path))
    assert spec.runs[0].scheme == SchemeId.BC_ONLY
    assert spec.preset == Preset.CUSTOM

    path.write_text(yaml.dump({"axis": {"name": "alpha1", "values": [3.0, 1.0]}}))
    with pytest.raises(ConfigError):
        load_sweep_spec(str(path))
    with pytest.raises(FileNotFoundError):
        load_sweep_spec(str(tmp_path / "nope.yaml"))
