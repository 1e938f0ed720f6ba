"""
Parameter sweeps behind the figure presets.

A sweep evaluates every (axis value, second-axis value) point for every scheme run
and emits one CSV row per result. Rows depend only on the SweepSpec, so the file is
byte-identical across runs and thread counts.
"""
import json
import logging
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from relaybc.allocator import SolverOptions
from relaybc.core.allocation import Allocation
from relaybc.core.channel import channel_gains
from relaybc.core.config import NetworkConfig, config_from_dict, default_config
from relaybc.core.errors import (
    AllocationInfeasibleError,
    ConfigError,
    CsvFormatError,
    InfeasiblePowerError,
    InfeasibleStage,
    RelayBCError,
)
from relaybc.experiments.metrics import RunMetrics
from relaybc.experiments.schemes import SchemeId, SchemeResult, evaluate_scheme
from relaybc.linmap import optimal_eigenvalues
from relaybc.oracle import timesharing_gap
from relaybc.throughput import rate_sum

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "preset",
    "kind",
    "axis",
    "value",
    "axis2",
    "value2",
    "scheme",
    "L",
    "status",
    "throughput_bits",
    "M",
    "N",
    "P0",
    "P1",
    "beta",
    "case",
    "rule",
    "iterations",
    "rho",
    "gap_bits",
    "note",
]
STR_COLUMNS = ["preset", "kind", "axis", "axis2", "scheme", "status", "case", "rule", "note"]
FLOAT_FORMAT = "%.12g"

_COORD_AXIS = re.compile(r"^coord_([srd])_([xy])$")


class Preset(str, Enum):
    """Figure presets."""

    FIG2 = "fig2-convergence"
    FIG3 = "fig3-alpha1"
    FIG4 = "fig4-gap"
    FIG5 = "fig5-schemes"
    FIG6 = "fig6-related"
    FIG7 = "fig7-hap-position"
    FIG8 = "fig8-subframes"
    CUSTOM = "custom"


class RowKind(str, Enum):
    ALLOCATION = "allocation"
    CONTINUOUS = "continuous"
    TRACE = "trace"
    GAP = "gap"


class SweepAxis(BaseModel):
    """A swept parameter: a NetworkConfig field, 'L' or coord_<node>_<x|y>."""

    name: str
    values: List[float] = Field(default_factory=list)
    paired: Dict[str, List[float]] = Field(
        default_factory=dict,
        description="Further axes set in lockstep, one value per entry of values",
    )

    @field_validator("values")
    @classmethod
    def _finite_sorted(cls, values: List[float]) -> List[float]:
        if not all(math.isfinite(v) for v in values):
            raise ValueError("axis values must be finite")
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError("axis values must be sorted ascending")
        return values

    @model_validator(mode="after")
    def _paired_lengths(self) -> "SweepAxis":
        for name, vals in self.paired.items():
            if len(vals) != len(self.values):
                raise ValueError(
                    f"paired axis '{name}' has {len(vals)} values, expected {len(self.values)}"
                )
            if not all(math.isfinite(v) for v in vals):
                raise ValueError(f"paired axis '{name}' values must be finite")
        return self


class SchemeRun(BaseModel):
    """One scheme, optionally at its own subframe count."""

    scheme: SchemeId
    L: Optional[int] = Field(None, ge=2, description="Overrides the scenario L for this run")


_REQUIRED_OVERRIDES: Dict[Preset, Dict[str, Any]] = {
    Preset.FIG5: {"alpha2": 3.2, "coord_d": (50.0, 0.0)},
    Preset.FIG6: {"alpha2": 3.2, "coord_d": (50.0, 0.0)},
}


class SweepSpec(BaseModel):
    """Everything needed to reproduce one sweep."""

    preset: Preset = Preset.CUSTOM
    axis: SweepAxis
    axis2: Optional[SweepAxis] = None
    runs: List[SchemeRun] = Field(default_factory=lambda: [SchemeRun(scheme=SchemeId.PROPOSED)])
    overrides: Dict[str, Any] = Field(default_factory=dict)
    base: NetworkConfig = Field(default_factory=default_config)
    trace: bool = Field(False, description="Emit SCA trace rows for the proposed scheme")
    gap: bool = Field(False, description="Emit time-sharing gap rows per point")
    output: Optional[str] = None

    @model_validator(mode="after")
    def _preset_overrides(self) -> "SweepSpec":
        for key, expected in _REQUIRED_OVERRIDES.get(self.preset, {}).items():
            got = self.overrides.get(key)
            if got is None or np.any(np.asarray(got, dtype=float) != np.asarray(expected)):
                raise ValueError(f"preset {self.preset.value} requires {key}={expected}")
        return self


class SweepRow(BaseModel):
    """One CSV row."""

    preset: str
    kind: RowKind
    axis: str
    value: Optional[float] = None
    axis2: str = ""
    value2: Optional[float] = None
    scheme: str
    L: int
    status: str = "ok"
    throughput_bits: Optional[float] = None
    M: Optional[int] = None
    N: Optional[int] = None
    P0: Optional[float] = None
    P1: Optional[float] = None
    beta: Optional[float] = None
    case: str = ""
    rule: str = ""
    iterations: Optional[int] = None
    rho: Optional[float] = None
    gap_bits: Optional[float] = None
    note: str = ""


def _alpha1_axis() -> SweepAxis:
    return SweepAxis(name="alpha1", values=np.round(np.arange(2.5, 4.0 + 1e-9, 0.1), 10).tolist())


def preset_spec(preset: Preset, base: Optional[NetworkConfig] = None) -> SweepSpec:
    """The sweep reproducing one figure."""
    preset = Preset(preset)
    base = base or default_config()
    related = {"alpha2": 3.2, "coord_d": (50.0, 0.0)}
    proposed = SchemeRun(scheme=SchemeId.PROPOSED)

    if preset == Preset.FIG2:
        return SweepSpec(
            preset=preset,
            axis=SweepAxis(name="Pmax", values=[20.0, 30.0]),
            overrides={"alpha1": 2.5},
            base=base,
            trace=True,
        )
    if preset == Preset.FIG3:
        return SweepSpec(
            preset=preset,
            axis=_alpha1_axis(),
            axis2=SweepAxis(name="Pmax", values=[20.0, 30.0]),
            runs=[proposed, SchemeRun(scheme=SchemeId.EXHAUSTIVE)],
            base=base,
        )
    if preset == Preset.FIG4:
        return SweepSpec(
            preset=preset,
            axis=SweepAxis(name="L", values=[float(L) for L in range(20, 101, 10)]),
            axis2=SweepAxis(
                name="alpha1",
                values=[2.6, 2.9, 3.9, 4.0],
                paired={"Pmax": [30.0, 30.0, 20.0, 20.0]},
            ),
            runs=[],
            base=base,
            gap=True,
        )
    if preset == Preset.FIG5:
        return SweepSpec(
            preset=preset,
            axis=_alpha1_axis(),
            runs=[
                proposed,
                SchemeRun(scheme=SchemeId.BC_ONLY),
                SchemeRun(scheme=SchemeId.RELAY_BC_FIXED),
                SchemeRun(scheme=SchemeId.OPPORTUNISTIC),
            ],
            overrides=related,
            base=base,
        )
    if preset == Preset.FIG6:
        return SweepSpec(
            preset=preset,
            axis=_alpha1_axis(),
            runs=[
                SchemeRun(scheme=SchemeId.PROPOSED, L=20),
                SchemeRun(scheme=SchemeId.PROPOSED, L=1000),
                SchemeRun(scheme=SchemeId.RELATED_UPPER, L=1000),
            ],
            overrides=related,
            base=base,
        )
    if preset == Preset.FIG7:
        return SweepSpec(
            preset=preset,
            axis=SweepAxis(name="coord_r_x", values=[float(x) for x in range(10, 91, 10)]),
            axis2=SweepAxis(name="coord_r_y", values=[float(y) for y in range(10, 41, 10)]),
            base=base,
        )
    if preset == Preset.FIG8:
        return SweepSpec(preset=preset, axis=_alpha1_axis(), base=base)
    return SweepSpec(preset=preset, axis=SweepAxis(name="alpha1", values=[]), base=base)


def load_sweep_spec(path: str) -> SweepSpec:
    """Read a custom sweep from JSON or YAML."""
    import yaml

    if not os.path.exists(path):
        raise FileNotFoundError(f"Sweep file not found at {path}")
    with open(path, "r") as f:
        data = json.load(f) if path.endswith(".json") else yaml.safe_load(f)
    try:
        return SweepSpec.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid sweep spec: {exc}") from exc


def is_coord_axis(name: str) -> bool:
    return _COORD_AXIS.match(name) is not None


def _apply_axis(data: Dict[str, Any], name: str, value: float) -> None:
    match = _COORD_AXIS.match(name)
    if match:
        key = f"coord_{match.group(1)}"
        coord = list(data[key])
        coord[0 if match.group(2) == "x" else 1] = value
        data[key] = tuple(coord)
    elif name == "L":
        data["L"] = int(round(value))
    elif name in NetworkConfig.model_fields:
        data[name] = value
    else:
        raise ConfigError(f"unknown sweep axis '{name}'")


def _apply_point(data: Dict[str, Any], axis: SweepAxis, value: float) -> None:
    _apply_axis(data, axis.name, value)
    if not axis.paired:
        return
    # CSV values come back through %.12g, so match the nearest entry
    i = int(np.argmin(np.abs(np.asarray(axis.values) - value)))
    if not math.isclose(axis.values[i], value, rel_tol=1e-9, abs_tol=1e-12):
        raise ConfigError(f"{value} is not a value of sweep axis '{axis.name}'")
    for name, vals in axis.paired.items():
        _apply_axis(data, name, vals[i])


def point_config(
    spec: SweepSpec,
    value: Optional[float],
    value2: Optional[float] = None,
    L: Optional[int] = None,
) -> NetworkConfig:
    """Scenario at one sweep point: base, then overrides, then axis values, then run L.

    Paired axes follow their parent axis value.
    """
    data = spec.base.model_dump()
    if "E" in spec.overrides:
        data.pop("P")
    data.update(spec.overrides)
    if value is not None:
        _apply_point(data, spec.axis, value)
    if spec.axis2 is not None and value2 is not None:
        _apply_point(data, spec.axis2, value2)
    if L is not None:
        data["L"] = L
    return config_from_dict(data)


def _failure_status(exc: RelayBCError) -> str:
    if isinstance(exc, AllocationInfeasibleError):
        return exc.stage.value
    if isinstance(exc, InfeasiblePowerError):
        return InfeasibleStage.PRC.value
    return "error"


def _result_rows(result: SchemeResult, head: Dict[str, Any], trace: bool) -> List[SweepRow]:
    alloc = result.allocation
    row = SweepRow(
        **head,
        kind=RowKind.ALLOCATION if alloc is not None else RowKind.CONTINUOUS,
        throughput_bits=result.throughput,
        M=alloc.M if alloc else None,
        N=alloc.N if alloc else None,
        P0=result.P0,
        P1=result.P1,
        beta=alloc.beta if alloc else None,
        case=result.case or "",
        rule=result.rule or "",
        iterations=result.iterations,
        rho=result.rho,
        note=result.note,
    )
    rows = [row]
    if trace:
        for step in result.sca_trace:
            share = 1.0 - step.rho
            rows.append(
                SweepRow(
                    **head,
                    kind=RowKind.TRACE,
                    throughput_bits=step.t,
                    P0=step.a / share,
                    P1=step.b / share,
                    iterations=step.iteration,
                    rho=step.rho,
                )
            )
    return rows


def _run_point(
    spec: SweepSpec,
    point: Tuple[Optional[float], Optional[float]],
    opts: SolverOptions,
    metrics: RunMetrics,
) -> List[SweepRow]:
    value, value2 = point
    common = {
        "preset": spec.preset.value,
        "axis": spec.axis.name,
        "value": value,
        "axis2": spec.axis2.name if spec.axis2 else "",
        "value2": value2,
    }
    rows: List[SweepRow] = []
    metrics.counter("points")

    for run in spec.runs:
        cfg = point_config(spec, value, value2, run.L)
        head = dict(common, scheme=run.scheme.value, L=cfg.L)
        try:
            with metrics.timed("solve_ms", {"scheme": run.scheme.value}):
                result = evaluate_scheme(run.scheme, channel_gains(cfg), cfg, opts)
        except RelayBCError as exc:
            logger.warning(f"{run.scheme.value} at {value}/{value2}: {exc}")
            metrics.counter("infeasible_points")
            rows.append(
                SweepRow(
                    **head,
                    kind=RowKind.ALLOCATION,
                    status=_failure_status(exc),
                    note=str(exc),
                )
            )
            continue
        metrics.gauge("iterations", result.iterations, {"scheme": run.scheme.value})
        tracing = spec.trace and run.scheme == SchemeId.PROPOSED
        rows.extend(_result_rows(result, head, tracing))

    if spec.gap:
        cfg = point_config(spec, value, value2)
        head = dict(common, scheme=SchemeId.PROPOSED.value, L=cfg.L)
        try:
            with metrics.timed("gap_ms"):
                gp = timesharing_gap(channel_gains(cfg), cfg, [cfg.L], opts)[0]
        except RelayBCError as exc:
            metrics.counter("infeasible_points")
            rows.append(
                SweepRow(**head, kind=RowKind.GAP, status=_failure_status(exc), note=str(exc))
            )
        else:
            rows.append(
                SweepRow(
                    **head,
                    kind=RowKind.GAP,
                    status=gp.status,
                    throughput_bits=gp.proposed,
                    M=gp.proposed_M,
                    N=cfg.L - gp.proposed_M if gp.proposed_M is not None else None,
                    gap_bits=gp.gap,
                    note=(
                        f"oracle_bits={gp.oracle:.12g}; oracle_M={gp.oracle_M}"
                        if gp.oracle is not None
                        else ""
                    ),
                )
            )
    return rows


def sweep_points(spec: SweepSpec) -> List[Tuple[Optional[float], Optional[float]]]:
    """Cartesian grid of the axis values (second axis inner)."""
    if spec.axis2 is None:
        return [(v, None) for v in spec.axis.values]
    return [(v, w) for v in spec.axis.values for w in spec.axis2.values]


def run_sweep(
    spec: SweepSpec,
    opts: Optional[SolverOptions] = None,
    threads: int = 1,
    metrics: Optional[RunMetrics] = None,
) -> List[SweepRow]:
    """Evaluate a sweep; failed points become rows with a non-ok status."""
    opts = opts or SolverOptions()
    metrics = metrics or RunMetrics()
    points = sweep_points(spec)
    logger.info(f"sweep {spec.preset.value}: {len(points)} points x {len(spec.runs)} runs")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            batches = list(pool.map(lambda p: _run_point(spec, p, opts, metrics), points))
    else:
        batches = [_run_point(spec, p, opts, metrics) for p in points]

    order = sorted(range(len(points)), key=lambda i: (points[i][0], points[i][1] or 0.0))
    return [row for i in order for row in batches[i]]


def rows_frame(rows: List[SweepRow]) -> pd.DataFrame:
    """Rows as a DataFrame with the fixed column order."""
    records = [r.model_dump(mode="json") for r in rows]
    return pd.DataFrame.from_records(records, columns=CSV_COLUMNS)


def write_csv(rows: List[SweepRow], path: str) -> None:
    rows_frame(rows).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"wrote {len(rows)} rows to {path}")


def read_csv(path: str) -> List[SweepRow]:
    """Parse a sweep CSV back into rows."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"CSV not found at {path}")
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise CsvFormatError(f"cannot parse {path}: {exc}") from exc

    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise CsvFormatError(f"{path} is missing columns: {', '.join(missing)}")

    rows = []
    for record in frame[CSV_COLUMNS].to_dict(orient="records"):
        clean = {
            k: None if isinstance(v, float) and math.isnan(v) else v for k, v in record.items()
        }
        for col in STR_COLUMNS:
            clean[col] = "" if clean[col] is None else str(clean[col])
        try:
            rows.append(SweepRow.model_validate(clean))
        except ValidationError as exc:
            raise CsvFormatError(f"bad row in {path}: {exc}") from exc
    return rows


def audit_csv(rows: List[SweepRow], spec: SweepSpec, rtol: float = 1e-8) -> List[str]:
    """Recompute every ok allocation row's throughput from its own columns.

    Returns:
        One message per row whose throughput does not match rate_sum
    """
    problems = []
    for i, row in enumerate(rows):
        if row.kind != RowKind.ALLOCATION or row.status != "ok":
            continue
        cfg = point_config(spec, row.value, row.value2, row.L)
        alloc = Allocation(
            M=row.M,
            N=row.N,
            P0=row.P0,
            P1=row.P1,
            beta=row.beta,
            eigenvalues=optimal_eigenvalues(row.M, row.N).values,
        )
        expected = rate_sum(alloc, channel_gains(cfg), cfg).r_sum
        if abs(expected - row.throughput_bits) > rtol * max(1.0, abs(expected)):
            problems.append(
                f"row {i} ({row.scheme} at {row.value}): {row.throughput_bits} != {expected}"
            )
    return problems
