"""CLI - typer application and plain-text formatting."""

from .formatter import TableFormat, format_bits, format_duration, format_table

__all__ = ["TableFormat", "format_bits", "format_duration", "format_table"]
