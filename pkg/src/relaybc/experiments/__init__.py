"""Experiments - comparison schemes, figure sweeps, CSV emission and plots."""

from .metrics import Metric, MetricType, RunMetrics
from .plot import PlotStyle, build_figure, emit_plot
from .schemes import SchemeId, SchemeResult, evaluate_scheme, scheme_throughput
from .sweep import (
    CSV_COLUMNS,
    Preset,
    RowKind,
    SchemeRun,
    SweepAxis,
    SweepRow,
    SweepSpec,
    audit_csv,
    load_sweep_spec,
    point_config,
    preset_spec,
    read_csv,
    rows_frame,
    run_sweep,
    sweep_points,
    write_csv,
)

__all__ = [
    "Metric",
    "MetricType",
    "RunMetrics",
    "PlotStyle",
    "build_figure",
    "emit_plot",
    "SchemeId",
    "SchemeResult",
    "evaluate_scheme",
    "scheme_throughput",
    "CSV_COLUMNS",
    "Preset",
    "RowKind",
    "SchemeRun",
    "SweepAxis",
    "SweepRow",
    "SweepSpec",
    "audit_csv",
    "load_sweep_spec",
    "point_config",
    "preset_spec",
    "read_csv",
    "rows_frame",
    "run_sweep",
    "sweep_points",
    "write_csv",
]
