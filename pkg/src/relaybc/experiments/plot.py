"""SVG figures rendered from sweep CSVs."""

import logging
from typing import Optional, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402
from pydantic import BaseModel, Field  # noqa: E402

from relaybc.core.errors import CsvFormatError  # noqa: E402
from relaybc.experiments.sweep import RowKind, is_coord_axis, read_csv, rows_frame  # noqa: E402

logger = logging.getLogger(__name__)

AXIS_LABELS = {
    "alpha1": "S-D path-loss exponent",
    "alpha2": "S-R path-loss exponent",
    "alpha3": "R-D path-loss exponent",
    "Pmax": "Peak HAP power Pmax (W)",
    "P": "Average HAP power P (W)",
    "L": "Total subframes L",
    "coord_r_x": "HAP x coordinate (m)",
    "coord_r_y": "HAP y coordinate (m)",
}
COLUMN_LABELS = {
    "throughput_bits": "Throughput (bits/block)",
    "gap_bits": "Time-sharing gap (bits/block)",
    "M": "Backscatter subframes M",
    "N": "Relay subframes N",
    "rho": "Time-share rho",
}


class PlotStyle(BaseModel):
    """Rendering options; unset labels are derived from the CSV."""

    kind: Optional[RowKind] = Field(None, description="Row kind to draw; inferred when unset")
    y: str = Field("throughput_bits", description="Column on the vertical axis")
    title: Optional[str] = None
    xlabel: Optional[str] = None
    ylabel: Optional[str] = None
    marker: str = "o"
    size: Tuple[float, float] = (6.4, 4.8)


def _infer_kind(frame: pd.DataFrame) -> RowKind:
    kinds = set(frame["kind"])
    for kind in (RowKind.TRACE, RowKind.GAP):
        if kind.value in kinds:
            return kind
    return RowKind.ALLOCATION


def _series_label(scheme: str, L: int, multi_L: bool, extra: str = "") -> str:
    label = f"{scheme} (L={L})" if multi_L else scheme
    return f"{label}, {extra}" if extra else label


def build_figure(frame: pd.DataFrame, style: Optional[PlotStyle] = None) -> Figure:
    """Draw one figure from a sweep frame.

    Two coordinate axes give a heatmap, trace rows give convergence curves per
    first-axis value, and everything else is one line per (scheme, L, second-axis value).
    """
    style = style or PlotStyle()
    if style.y not in frame.columns:
        raise CsvFormatError(f"column '{style.y}' not in CSV")
    fig, ax = plt.subplots(figsize=style.size)
    ok = frame[frame["status"] == "ok"]
    axis_name = str(frame["axis"].iloc[0]) if len(frame) else ""
    axis2_name = str(frame["axis2"].iloc[0]) if len(frame) else ""
    axis2_name = "" if axis2_name == "nan" else axis2_name
    kind = style.kind or (_infer_kind(frame) if len(frame) else RowKind.ALLOCATION)
    xlabel = style.xlabel or AXIS_LABELS.get(axis_name, axis_name)
    ylabel = style.ylabel or COLUMN_LABELS.get(style.y, style.y)

    if is_coord_axis(axis_name) and is_coord_axis(axis2_name):
        rows = ok[ok["kind"] == RowKind.ALLOCATION.value]
        if len(rows):
            grid = rows.pivot_table(index="value2", columns="value", values=style.y, aggfunc="max")
            mesh = ax.pcolormesh(grid.columns, grid.index, grid.values, shading="nearest")
            fig.colorbar(mesh, ax=ax, label=ylabel)
        ax.set_ylabel(AXIS_LABELS.get(axis2_name, axis2_name))
    elif kind == RowKind.TRACE:
        rows = ok[ok["kind"] == RowKind.TRACE.value]
        for value, group in rows.groupby("value", sort=True):
            label = f"{axis_name}={value:g}"
            ax.plot(group["iterations"], group[style.y], marker=style.marker, label=label)
        xlabel = style.xlabel or "SCA iteration"
        ax.set_ylabel(ylabel)
    else:
        wanted = [kind.value] if kind == RowKind.GAP else [kind.value, RowKind.CONTINUOUS.value]
        rows = ok[ok["kind"].isin(wanted)].copy()
        # an L axis moves L along each curve
        by_L = axis_name != "L"
        if not by_L:
            rows["L"] = 0
        if not axis2_name:
            rows["value2"] = 0.0
        multi_L = by_L and (rows.groupby("scheme")["L"].nunique().max() > 1 if len(rows) else False)
        for (scheme, L, value2), group in rows.groupby(["scheme", "L", "value2"], sort=False):
            group = group.sort_values("value")
            extra = f"{axis2_name}={value2:g}" if axis2_name else ""
            ax.plot(
                group["value"],
                group[style.y],
                marker=style.marker,
                label=_series_label(scheme, L, multi_L, extra),
            )
        ax.set_ylabel(ylabel)

    ax.set_xlabel(xlabel)
    if style.title:
        ax.set_title(style.title)
    if ax.get_lines():
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def emit_plot(csv_path: str, out_path: str, style: Optional[PlotStyle] = None) -> str:
    """Render a sweep CSV to an SVG file and return its path."""
    frame = rows_frame(read_csv(csv_path))
    fig = build_figure(frame, style)
    try:
        fig.savefig(out_path, format="svg")
    finally:
        plt.close(fig)
    logger.info(f"plot written to {out_path}")
    return out_path
