"""
Sweep Runner

Runs a scenario over its grid:
1. Calibration (resonant presets only)
2. Integration of every grid point, in parallel worker processes
3. Observable evaluation
4. Reassembly in axis order
"""

import asyncio
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from config import DEFAULT_JOBS, MAX_RHS_EVALUATIONS, MIXED_TOLERANCE
from simulation import __version__
from simulation.adiabatic import calibrate_resonant_coupling
from simulation.dynamics import evolve
from simulation.errors import SimulationError
from simulation.metrics import (
    concurrence_c3,
    target_state,
    factorization_residual,
    fidelity,
    mean_photon,
    purity_atoms,
    two_qubit_state,
    wootters_concurrence,
)
from simulation.statespace import StateVector

from .scenarios import Scenario
from .stats import IntegrationTracker, reset_tracker

console = Console(stderr=True)

CONVERGENCE_WARN = 1e-6


@dataclass
class SweepResult:
    """Rows in axis order plus everything needed to reproduce them."""
    columns: list[str]
    rows: list[dict]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        if name not in self.columns:
            raise KeyError(f"Column {name!r} not in result (have {', '.join(self.columns)})")
        return [row[name] for row in self.rows]

    @property
    def axis(self) -> str:
        return self.columns[0]

    @property
    def failures(self) -> int:
        return sum(1 for row in self.rows if row.get("status", "ok") != "ok")


def evaluate_observables(final, observables: tuple[str, ...]) -> dict[str, float]:
    """Evaluate named observables on a final state."""
    space = final.space
    values = {}
    for name in observables:
        if name == "fidelity":
            values[name] = fidelity(final, target_state(space))
        elif name == "c3":
            values[name] = concurrence_c3(final) if isinstance(final, StateVector) else math.nan
        elif name == "wootters":
            values[name] = wootters_concurrence(two_qubit_state(final))
        elif name == "mean_photon":
            values[name] = mean_photon(final)
        elif name == "factorization_residual":
            values[name] = factorization_residual(final)
        elif name == "purity_atoms":
            values[name] = purity_atoms(final)
        else:
            raise KeyError(f"Unknown observable {name!r}")
    return values


def evaluate_point(scenario: Scenario, index: int, value: float) -> dict:
    """
    Integrate one grid point for every column variant. Used for parallel execution.

    Returns:
        Dict with index, row, rhs_evaluations, duration_ms and status
    """
    started = time.perf_counter()
    row = {scenario.axis: value}
    rhs_evaluations = 0
    status = "ok"
    for variant in scenario.variants():
        try:
            config = scenario.config_at(value, variant)
            trajectory = evolve(scenario.initial(config.space), config, samples=2)
            rhs_evaluations += trajectory.rhs_evaluations
            observed = evaluate_observables(trajectory.final, scenario.observables)
        except SimulationError as e:
            status = f"error: {type(e).__name__}: {e}"
            observed = {name: math.nan for name in scenario.observables}
        for name, result in observed.items():
            row[f"{name}{variant.suffix}"] = result
    row["status"] = status
    return {
        "index": index,
        "row": row,
        "rhs_evaluations": rhs_evaluations,
        "duration_ms": (time.perf_counter() - started) * 1000,
        "status": "ok" if status == "ok" else "error",
    }


def _evaluate_job(job: tuple[Scenario, int, float]) -> dict:
    return evaluate_point(*job)


def resolve_scenario(scenario: Scenario, verbose: bool = False) -> tuple[Scenario, dict]:
    """Apply resonance calibration when the scenario asks for it."""
    if not scenario.parameters.get("calibrate_resonance"):
        return scenario, {}
    requested = float(scenario.parameters["g0"])
    closed = scenario.with_parameters(gamma_c=0.0, gamma_s=0.0, delta0_over_g0=0.0)
    if verbose:
        console.print(f"[dim]Calibrating resonant coupling near g0σ = {requested:g}...[/]")
    calibrated = calibrate_resonant_coupling(closed.base, near=requested, refine=True)
    if verbose:
        console.print(f"[dim]Calibrated g0σ = {calibrated:.6f}[/]")
    return scenario.with_parameters(g0=calibrated, calibrate_resonance=False), {
        "g0_requested": requested,
        "g0_calibrated": calibrated,
    }


def _worker_count(jobs: int, points: int) -> int:
    if jobs <= 0:
        jobs = os.cpu_count() or 1
    return max(1, min(jobs, points))


def _make_progress() -> Progress:
    return Progress(
        TextColumn("[bold blue]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
    )


async def _run_parallel(
    scenario: Scenario,
    workers: int,
    progress: Optional[Progress],
    task_id,
) -> list[dict]:
    loop = asyncio.get_running_loop()

    with ProcessPoolExecutor(max_workers=workers) as executor:
        async def run(index: int, value: float) -> dict:
            item = await loop.run_in_executor(executor, _evaluate_job, (scenario, index, value))
            if progress is not None:
                progress.advance(task_id)
            return item

        return await asyncio.gather(*(run(i, v) for i, v in enumerate(scenario.values)))


def run_scenario(
    scenario: Scenario,
    jobs: int = DEFAULT_JOBS,
    verbose: bool = False,
    tracker: Optional[IntegrationTracker] = None,
    resolution: Optional[tuple[Scenario, dict]] = None,
) -> SweepResult:
    """
    Integrate every grid point of a scenario and collect its observables.

    Points run concurrently in worker processes, but rows are returned in
    axis order. Integration failures are recorded in the row's status
    column and the sweep continues.

    Args:
        scenario: Validated scenario
        jobs: Worker processes (0 = one per core, 1 = inline)
        verbose: Show progress on the console
        tracker: Tracker receiving per-point statistics (default: the global
            tracker, reset for this sweep)
        resolution: Output of resolve_scenario when the caller already ran it

    Returns:
        SweepResult with one row per grid point
    """
    tracker = tracker or reset_tracker()
    started = time.perf_counter()
    if resolution is None:
        resolution = resolve_scenario(scenario, verbose=verbose)
    resolved, calibration = resolution
    workers = _worker_count(jobs, len(resolved.values))

    progress = _make_progress() if verbose else None
    if progress is not None:
        progress.start()
        task_id = progress.add_task(resolved.name, total=len(resolved.values))
    else:
        task_id = None

    try:
        if workers == 1:
            completed = []
            for index, value in enumerate(resolved.values):
                completed.append(evaluate_point(resolved, index, value))
                if progress is not None:
                    progress.advance(task_id)
        else:
            completed = asyncio.run(_run_parallel(resolved, workers, progress, task_id))
    finally:
        if progress is not None:
            progress.stop()

    # Collect results by grid index
    by_index = {item["index"]: item for item in completed}
    rows = []
    for index, value in enumerate(resolved.values):
        item = by_index[index]
        tracker.add_point(index, value, item["rhs_evaluations"], item["duration_ms"], item["status"])
        rows.append(item["row"])

    if verbose and tracker.failures:
        console.print(f"[yellow]Warning:[/] {tracker.failures} of {len(rows)} points failed to integrate")

    metadata = {
        "scenario": scenario.to_dict(),
        "resolved_parameters": resolved.to_dict()["parameters"],
        "calibration": calibration,
        "tolerances": {
            "pure": resolved.base.tol,
            "mixed": max(resolved.base.tol, MIXED_TOLERANCE),
            "max_rhs_evaluations": MAX_RHS_EVALUATIONS,
        },
        "version": __version__,
        "jobs": workers,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_time_s": round(time.perf_counter() - started, 3),
        "integration": tracker.to_dict(),
    }
    return SweepResult(columns=resolved.columns, rows=rows, metadata=metadata)


def cutoff_convergence(
    scenario: Scenario,
    value: float,
    verbose: bool = True,
) -> dict:
    """
    Re-evaluate one grid point with the Fock cutoff doubled.

    Returns:
        Dict with both cutoffs, the per-observable change, and whether the
        largest change stays below CONVERGENCE_WARN
    """
    resolved, _ = resolve_scenario(scenario)
    cutoff = int(resolved.parameters["cutoff"])
    coarse = evaluate_point(resolved, 0, value)["row"]
    fine = evaluate_point(resolved.with_parameters(cutoff=2 * cutoff), 0, value)["row"]
    changes = {
        name: abs(fine[name] - coarse[name])
        for name in resolved.columns[1:-1]
        if not (math.isnan(coarse[name]) or math.isnan(fine[name]))
    }
    worst = max(changes.values(), default=0.0)
    converged = worst <= CONVERGENCE_WARN
    if verbose and not converged:
        console.print(
            f"[yellow]Warning:[/] cutoff {cutoff} -> {2 * cutoff} changes observables by up to {worst:.2e}"
        )
    return {
        "cutoff": cutoff,
        "doubled": 2 * cutoff,
        "value": value,
        "changes": changes,
        "max_change": worst,
        "converged": converged,
    }
