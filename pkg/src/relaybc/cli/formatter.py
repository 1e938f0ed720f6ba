"""Plain-text formatting for CLI summaries."""

from enum import Enum
from typing import Any, Dict, List, Optional


class TableFormat(str, Enum):
    """Table formatting styles."""

    SIMPLE = "simple"
    GRID = "grid"


def format_bits(bits: Optional[float]) -> str:
    """Throughput in bits/block, or '-' when unavailable."""
    if bits is None:
        return "-"
    return f"{bits:,.3f} bits"


def format_duration(milliseconds: float) -> str:
    """Format duration in human-readable format.

    Args:
        milliseconds: Duration in milliseconds

    Returns:
        Formatted duration string
    """
    if milliseconds < 1000:
        return f"{milliseconds:.0f}ms"
    if milliseconds < 60000:
        return f"{milliseconds / 1000:.1f}s"
    return f"{milliseconds / 60000:.1f}m"


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return "" if value is None else str(value)


def format_table(
    data: List[Dict[str, Any]],
    columns: Optional[List[str]] = None,
    style: TableFormat = TableFormat.SIMPLE,
) -> str:
    """Format rows of dicts as a fixed-width table.

    Args:
        data: List of dictionaries
        columns: Optional list of column names (defaults to the first row's keys)
        style: Table formatting style

    Returns:
        Formatted table string
    """
    if not data:
        return "(empty)"

    columns = columns or list(data[0].keys())
    cells = [[_cell(row.get(col)) for col in columns] for row in data]
    widths = [max(len(col), *(len(r[i]) for r in cells)) for i, col in enumerate(columns)]

    def line(values: List[str]) -> str:
        return " | ".join(v.ljust(w) for v, w in zip(values, widths))

    if style == TableFormat.GRID:
        rule = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
        body = [f"| {line(r)} |" for r in cells]
        return "\n".join([rule, f"| {line(columns)} |", rule, *body, rule])

    header = line(columns)
    return "\n".join([header, "-" * len(header)] + [line(r) for r in cells])
