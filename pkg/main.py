#!/usr/bin/env python3
"""
Cavity Entanglement Simulator
Main CLI entry point for sweeps, spectra and phase predictions.
"""

import math
from pathlib import Path
from typing import Optional

import numpy as np
import typer
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from config import DEFAULT_JOBS, ensure_output_dir, validate_config
from experiments import (
    PRESETS,
    Scenario,
    SweepResult,
    export,
    find_peaks,
    get_tracker,
    load_config,
    load_result,
    preset,
    run_scenario,
)
from experiments.runner import resolve_scenario
from simulation import __version__
from simulation.adiabatic import (
    adiabatic_phases,
    instantaneous_spectrum,
    predicted_fidelity,
    solve_chirp_amplitude,
)
from simulation.errors import ConfigError, SimulationError
from simulation.model import crossing_time, pulse_overlap

app = typer.Typer(
    name="simulate",
    help="Simulate two atoms crossing a cavity and the entanglement they leave with.",
    add_completion=False,
)
console = Console()

EXIT_CONFIG = 1
EXIT_SIMULATION = 2
EXIT_IO = 3


def _load_scenario(preset_name: Optional[str], config_path: Optional[Path]) -> Scenario:
    if config_path is not None:
        scenario = load_config(config_path)
        if preset_name and scenario.name != preset_name:
            console.print(f"[dim]Config file overrides preset {preset_name!r}[/]")
        return scenario
    if preset_name is None:
        raise ConfigError("give --preset or --config")
    return preset(preset_name)


def _fail(error: Exception, verbose: bool) -> None:
    if isinstance(error, KeyboardInterrupt):
        console.print("\n[yellow]Interrupted by user[/]")
        raise typer.Exit(130)
    if isinstance(error, ConfigError):
        console.print(f"[bold red]Configuration Error:[/] {error}")
        raise typer.Exit(EXIT_CONFIG)
    if isinstance(error, SimulationError):
        console.print(f"\n[bold red]Simulation Error:[/] {error}")
        if verbose:
            console.print_exception()
        raise typer.Exit(EXIT_SIMULATION)
    if isinstance(error, OSError):
        console.print(f"\n[bold red]I/O Error:[/] {error}")
        raise typer.Exit(EXIT_IO)
    raise error


@app.command()
def run(
    preset_name: Optional[str] = typer.Option(
        None,
        "--preset", "-p",
        help=f"Scenario preset ({', '.join(PRESETS)})",
    ),
    config_path: Optional[Path] = typer.Option(
        None,
        "--config", "-c",
        help="Experiment config file (key = value with dotted keys)",
        exists=True,
        file_okay=True,
        dir_okay=False,
        readable=True,
    ),
    out: Optional[Path] = typer.Option(
        None,
        "--out", "-o",
        help="Output file (default: ./output/<scenario>.<format>)",
    ),
    fmt: str = typer.Option(
        "csv",
        "--format", "-f",
        help="Output format: csv or json",
    ),
    cutoff: Optional[int] = typer.Option(
        None,
        "--cutoff", "-n",
        help="Override the Fock cutoff",
        min=1,
    ),
    tol: Optional[float] = typer.Option(
        None,
        "--tol", "-t",
        help="Override the integrator relative tolerance",
    ),
    jobs: int = typer.Option(
        DEFAULT_JOBS,
        "--jobs", "-j",
        help="Worker processes (0 = one per core)",
        min=0,
    ),
    verbose: bool = typer.Option(
        True,
        "--verbose/--quiet", "-v/-q",
        help="Show detailed progress",
    ),
):
    """
    Run a parameter sweep and write one row per grid point.
    """
    try:
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown format {fmt!r} (csv or json)", field="--format")
        scenario = _load_scenario(preset_name, config_path)
        overrides = {}
        if cutoff is not None:
            overrides["cutoff"] = cutoff
        if tol is not None:
            overrides["tol"] = tol
        if overrides:
            scenario = scenario.with_parameters(**overrides)

        resolved, calibration = resolve_scenario(scenario, verbose=verbose)
        params = scenario.parameters
        if calibration:
            coupling_line = (
                f"[dim]g0σ:[/] {calibration['g0_requested']:g} → {calibration['g0_calibrated']:.6f} "
                f"[dim](calibrated to close the resonant phase)[/]"
            )
        else:
            coupling_line = f"[dim]g0σ:[/] {params['g0']:g}"
        console.print(Panel.fit(
            f"[bold]{scenario.name}[/] {scenario.description}\n"
            f"[dim]Axis:[/] {scenario.axis} ({len(scenario.values)} points, "
            f"{scenario.values[0]:g} → {scenario.values[-1]:g})\n"
            f"{coupling_line}  [dim]δ:[/] {params['delta']:g}  "
            f"[dim]τ0:[/] {params['tau0']:g}  [dim]σ_s:[/] {params['sigma_s']:g}\n"
            f"[dim]Cutoff:[/] {params['cutoff']}  [dim]Tolerance:[/] {params['tol']:g}\n"
            f"[dim]Observables:[/] {', '.join(scenario.observables)}",
            title="Configuration",
        ))

        if resolved.base.chirps.delta0 and pulse_overlap(resolved.base) > 1e-4:
            console.print("[yellow]Warning:[/] chirps overlap the partner atom's pulse; phase predictions degrade")

        result = run_scenario(scenario, jobs=jobs, verbose=verbose, resolution=(resolved, calibration))
        destination = out or ensure_output_dir() / f"{scenario.name}.{fmt}"
        export(result, destination, fmt)

        tracker = get_tracker()
        failed = tracker.failures
        status_color = "green" if failed == 0 else "yellow"
        slowest = ", ".join(
            f"{record.value:g} ({record.rhs_evaluations:,})" for record in tracker.slowest(3)
        )
        console.print(Panel(
            f"{tracker.format_summary()}\n"
            f"[bold]Slowest points:[/] {slowest}\n"
            f"[bold]Wall time:[/] {result.metadata['wall_time_s']:.1f}s",
            title=f"[bold {status_color}]Sweep Summary[/]",
            border_style=status_color,
        ))
        console.print(f"\n[dim]Output saved to:[/] {destination}")
    except (Exception, KeyboardInterrupt) as e:
        _fail(e, verbose)


@app.command()
def peaks(
    in_path: Path = typer.Option(
        ...,
        "--in", "-i",
        help="CSV or JSON sweep result",
        exists=True,
        file_okay=True,
        dir_okay=False,
        readable=True,
    ),
    observable: str = typer.Option(
        "fidelity",
        "--observable", "-O",
        help="Column to search",
    ),
    min_height: Optional[float] = typer.Option(
        None,
        "--min-height",
        help="Ignore peaks below this height",
    ),
    minima: bool = typer.Option(
        False,
        "--minima",
        help="Report local minima instead of maxima",
    ),
):
    """
    List local extrema of a sweep column.
    """
    try:
        result = load_result(in_path)
        found = find_peaks(result, observable, min_height=min_height, minima=minima)
    except KeyError as e:
        console.print(f"[bold red]Error:[/] {e.args[0]}")
        raise typer.Exit(EXIT_CONFIG)
    except ValueError as e:
        console.print(f"[bold red]Error:[/] {e}")
        raise typer.Exit(EXIT_CONFIG)
    except OSError as e:
        _fail(e, False)

    table = Table(title=f"{'Minima' if minima else 'Peaks'} of {observable}")
    table.add_column("#", justify="right")
    table.add_column(result.axis, justify="right")
    table.add_column(observable, justify="right")
    for number, peak in enumerate(found, 1):
        table.add_row(str(number), f"{peak.axis_value:.6g}", f"{peak.height:.6g}")
    console.print(table)
    if not found:
        console.print("[yellow]No extrema found[/]")


@app.command()
def spectrum(
    preset_name: Optional[str] = typer.Option(None, "--preset", "-p", help="Scenario preset"),
    config_path: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Experiment config file", exists=True, dir_okay=False,
    ),
    sector: int = typer.Option(1, "--sector", "-s", help="Excitation number of the block", min=0),
    at: Optional[float] = typer.Option(None, "--at", help="Sweep-axis value to use (default: base parameters)"),
    samples: int = typer.Option(2001, "--samples", help="Number of τ samples", min=3),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output CSV"),
):
    """
    Write the tracked adiabatic energies of one excitation sector.
    """
    try:
        scenario, _ = resolve_scenario(_load_scenario(preset_name, config_path))
        config = scenario.config_at(at) if at is not None else scenario.base
        curves = instantaneous_spectrum(config, np.linspace(*config.window, samples), sector)
        columns = ["tau"] + [f"E{c.curve_id}" for c in curves]
        rows = [
            {"tau": float(tau), **{f"E{c.curve_id}": float(c.energies[i]) for c in curves}}
            for i, tau in enumerate(curves[0].taus)
        ]
        result = SweepResult(columns=columns, rows=rows, metadata={"sector": sector, "config": config.to_dict()})
        destination = out or ensure_output_dir() / f"{scenario.name}_spectrum_sector{sector}.csv"
        export(result, destination, "csv")
        flagged = curves[0].crossings
        if flagged:
            console.print(f"[dim]Exact crossings flagged at τ ≈ {', '.join(f'{t:.4f}' for t in flagged[:5])}[/]")
        console.print(f"[dim]Output saved to:[/] {destination}")
    except (Exception, KeyboardInterrupt) as e:
        _fail(e, False)


@app.command()
def predict(
    preset_name: Optional[str] = typer.Option("fig2", "--preset", "-p", help="Scenario preset"),
    config_path: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Experiment config file", exists=True, dir_okay=False,
    ),
    n: int = typer.Option(-1, "--n", help="Gate sector label (excitation number n + 2)"),
    m: Optional[int] = typer.Option(None, "--m", help="Target turns (default: next whole turn)"),
):
    """
    Predict the chirp amplitude that closes the gate phase, and the gate fidelity.
    """
    try:
        scenario = _load_scenario(preset_name, config_path)
        config = scenario.base
        phases = adiabatic_phases(config, n)
        delta0 = solve_chirp_amplitude(config, m=m, n=n)
        g0 = config.g0

        table = Table(title=f"Phase closure for {scenario.name}")
        table.add_column("Quantity")
        table.add_column("Value", justify="right")
        table.add_row("resonant phase φ_n", f"{phases.phi_n:.6f} rad ({phases.phi_n / (2 * math.pi):.4f} turns)")
        table.add_row("chirp shift at base Δ0", f"{phases.shift:.6f} rad")
        table.add_row("predicted fidelity at base Δ0", f"{predicted_fidelity(phases.phi_tilde):.6f}")
        table.add_row("closing Δ0", f"{delta0:.6f} /σ ({delta0 / g0:.4f} g0)")
        closed = adiabatic_phases(config.with_chirp(delta0), n)
        table.add_row("closed phase φ̃_n", f"{closed.phi_tilde:.6f} rad ({closed.turns:.6f} turns)")
        pulses = config.pulses
        if pulses.g2 > 0 and pulses.delta > 0 and pulses.g1 != pulses.g2:
            table.add_row("crossing time τ_c", f"{crossing_time(pulses.g1, pulses.g2, pulses.delta):.6f}")
        console.print(table)
    except (Exception, KeyboardInterrupt) as e:
        _fail(e, False)


@app.command()
def check():
    """
    Check configuration and dependencies.
    """
    console.print("[bold]Checking simulator configuration...[/]\n")

    config_status = validate_config()

    if config_status["valid"]:
        console.print("[green]✓[/] Configuration valid")
    else:
        console.print("[red]✗[/] Configuration issues:")
        for issue in config_status["issues"]:
            console.print(f"    • {issue}")

    table = Table(show_header=False, box=None)
    for key, value in config_status["config"].items():
        table.add_row(f"[dim]{key}[/]", str(value))
    console.print(table)

    console.print("\n[bold]Dependencies:[/]")

    dependencies = [
        ("numpy", "numpy"),
        ("scipy", "scipy"),
        ("rich", "rich"),
        ("typer", "typer"),
        ("python-dotenv", "dotenv"),
    ]

    all_ok = True
    for name, import_name in dependencies:
        try:
            __import__(import_name)
            console.print(f"  [green]✓[/] {name}")
        except ImportError:
            console.print(f"  [red]✗[/] {name} - not installed")
            all_ok = False

    if all_ok and config_status["valid"]:
        console.print("\n[bold green]All checks passed! Ready to simulate.[/]")
    else:
        console.print("\n[yellow]Some issues need attention.[/]")
        raise typer.Exit(1)


@app.command()
def version():
    """Show version information."""
    console.print("[bold]simulate[/] - cavity entanglement simulator")
    console.print(f"[dim]Version {__version__}[/]")


if __name__ == "__main__":
    app()
