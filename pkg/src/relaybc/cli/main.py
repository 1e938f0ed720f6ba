import logging
import os
from typing import List, NoReturn, Optional

import typer
import yaml
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.text import Text

from relaybc.allocator import allocate
from relaybc.cli.formatter import TableFormat, format_bits, format_duration, format_table
from relaybc.core import (
    AllocationInfeasibleError,
    ConfigError,
    NetworkConfig,
    RelayBCError,
    channel_gains,
    default_config,
    load_config,
)
from relaybc.experiments import (
    PlotStyle,
    Preset,
    RowKind,
    RunMetrics,
    audit_csv,
    emit_plot,
    load_sweep_spec,
    preset_spec,
    run_sweep,
    write_csv,
)
from relaybc.oracle import exhaustive_allocate
from relaybc.validation import default_registry

app = typer.Typer(
    name="relaybc",
    help="Throughput maximisation for relay-enabled backscatter networks",
    add_completion=False,
)
console = Console()
err_console = Console(stderr=True)

EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


def _fail(message: str, code: int = EXIT_ERROR) -> NoReturn:
    err_console.print(f"[bold red]Error:[/bold red] {message}")
    raise typer.Exit(code)


def _scenario(config: Optional[str]) -> NetworkConfig:
    if config is None:
        return default_config()
    try:
        return load_config(config)
    except (FileNotFoundError, ConfigError) as exc:
        _fail(str(exc))


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable debug logging"),
):
    """
    Solve, sweep, plot and validate relay-assisted backscatter allocations.
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, rich_tracebacks=True)],
        force=True,
    )


@app.command()
def init(
    path: str = typer.Argument("scenario.yaml", help="Where to write the scenario file"),
):
    """
    Write the default scenario as an editable YAML file.
    """
    if os.path.exists(path):
        _fail(f"File '{path}' already exists.")
    with open(path, "w") as f:
        yaml.dump(default_config().model_dump(mode="json"), f, sort_keys=False)
    console.print(
        Panel(f"[bold green]Wrote default scenario to {path}[/bold green]", title="Success")
    )


@app.command()
def solve(
    config: Optional[str] = typer.Option(None, help="Scenario file (JSON or YAML)"),
    out: Optional[str] = typer.Option(None, help="Write the report here instead of stdout"),
    oracle: bool = typer.Option(False, help="Use exhaustive search over the subframe split"),
    candidates: Optional[str] = typer.Option(None, help="With --oracle, per-split table as CSV"),
    threads: int = typer.Option(1, min=1, help="With --oracle, worker threads over the splits"),
):
    """
    Allocate subframes and powers for one scenario and print the report as JSON.
    """
    cfg = _scenario(config)
    try:
        chan = channel_gains(cfg)
        if oracle:
            report = exhaustive_allocate(chan, cfg, threads=threads)
        else:
            report = allocate(chan, cfg)
    except AllocationInfeasibleError as exc:
        _fail(str(exc), EXIT_INFEASIBLE)
    except RelayBCError as exc:
        _fail(str(exc))

    if candidates:
        if not oracle:
            _fail("--candidates needs --oracle")
        report.write_candidates_csv(candidates)

    payload = report.serialize()
    if out is None:
        typer.echo(payload)
        return
    with open(out, "w") as f:
        f.write(payload)
    alloc = report.allocation
    console.print(
        Panel(
            f"M={alloc.M}  N={alloc.N}  P0={alloc.P0:.4f} W  P1={alloc.P1:.4f} W  "
            f"beta={alloc.beta:.6f}\nthroughput {format_bits(report.throughput)} "
            f"({report.case.value})\nreport written to {out}",
            title="Allocation",
        )
    )


@app.command()
def sweep(
    preset: Optional[Preset] = typer.Option(None, help="Figure preset"),
    spec: Optional[str] = typer.Option(None, help="Custom sweep file (JSON or YAML)"),
    config: Optional[str] = typer.Option(None, help="Base scenario file"),
    out: Optional[str] = typer.Option(None, help="CSV path (default <preset>.csv)"),
    threads: int = typer.Option(1, min=1, help="Worker threads for sweep points"),
    audit: bool = typer.Option(False, help="Re-derive every throughput from its CSV row"),
):
    """
    Run a parameter sweep and write one CSV row per point and scheme.
    """
    if (preset is None) == (spec is None):
        _fail("give exactly one of --preset or --spec")

    base = _scenario(config) if config else None
    try:
        if preset is not None:
            sweep_spec = preset_spec(preset, base)
        else:
            sweep_spec = load_sweep_spec(spec)
            if base is not None:
                sweep_spec = sweep_spec.model_copy(update={"base": base})
    except (FileNotFoundError, ConfigError) as exc:
        _fail(str(exc))

    path = out or sweep_spec.output or f"{sweep_spec.preset.value}.csv"
    metrics = RunMetrics()
    rows = run_sweep(sweep_spec, threads=threads, metrics=metrics)
    write_csv(rows, path)

    columns = ["metric", "metric_type", "count", "min", "max", "avg", "latest"]
    console.print(Panel(Text(format_table(metrics.summary(), columns)), title="Run metrics"))
    console.print(f"[bold green]{len(rows)} rows written to {path}[/bold green]")

    if audit:
        problems = audit_csv(rows, sweep_spec)
        for problem in problems:
            err_console.print(problem, markup=False)
        if problems:
            _fail(f"{len(problems)} rows fail the throughput audit")

    failed = [r for r in rows if r.status != "ok"]
    if failed:
        console.print(f"[yellow]{len(failed)} infeasible points (see the status column)[/yellow]")
        raise typer.Exit(EXIT_INFEASIBLE)


@app.command()
def plot(
    csv: str = typer.Argument(..., help="Sweep CSV"),
    out: Optional[str] = typer.Option(None, help="SVG path (default next to the CSV)"),
    y: str = typer.Option("throughput_bits", help="Column on the vertical axis"),
    kind: Optional[RowKind] = typer.Option(None, help="Row kind to draw"),
    title: Optional[str] = typer.Option(None, help="Figure title"),
):
    """
    Render a sweep CSV as an SVG figure.
    """
    path = out or os.path.splitext(csv)[0] + ".svg"
    try:
        emit_plot(csv, path, PlotStyle(kind=kind, y=y, title=title))
    except (FileNotFoundError, RelayBCError) as exc:
        _fail(str(exc))
    console.print(f"[bold green]Figure written to {path}[/bold green]")


@app.command()
def validate(
    suite: Optional[List[str]] = typer.Option(None, "--suite", "-s", help="Suite to run"),
    seed: int = typer.Option(0, help="Seed for the randomised suites"),
    run_all: bool = typer.Option(False, "--all", help="Include the slow sweep suites"),
    list_suites: bool = typer.Option(False, "--list", help="List suites and exit"),
):
    """
    Run the invariant suites and report one line per suite.
    """
    registry = default_registry()
    if list_suites:
        rows = [
            {"suite": s.name, "slow": "yes" if s.slow else "", "description": s.description}
            for s in registry.suites.values()
        ]
        console.print(format_table(rows), markup=False)
        return

    names = suite or registry.list_suites(include_slow=run_all)
    results = registry.run(names, seed=seed)
    rows = [
        {
            "suite": r.name,
            "status": r.status.value,
            "time": format_duration(r.duration_ms or 0.0),
            "message": r.error or r.message,
        }
        for r in results
    ]
    console.print(format_table(rows, style=TableFormat.GRID), markup=False)

    failed = [r.name for r in results if not r.is_success()]
    if failed:
        _fail(f"{len(failed)} suite(s) did not pass: {', '.join(failed)}")
    console.print(f"[bold green]{len(results)} suites passed[/bold green]")


if __name__ == "__main__":
    app()
