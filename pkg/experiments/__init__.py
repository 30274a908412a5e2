"""
Experiment Harness

Scenario presets and config files, parallel sweeps, peak finding and
CSV/JSON persistence for the cavity entanglement simulator.
"""

from .scenarios import Scenario, PRESETS, OBSERVABLES, preset, load_config, parse_config
from .runner import SweepResult, run_scenario, cutoff_convergence
from .peaks import Peak, find_peaks
from .export import export, load_result
from .stats import IntegrationTracker, get_tracker, reset_tracker

__all__ = [
    "Scenario",
    "PRESETS",
    "OBSERVABLES",
    "preset",
    "load_config",
    "parse_config",
    "SweepResult",
    "run_scenario",
    "cutoff_convergence",
    "Peak",
    "find_peaks",
    "export",
    "load_result",
    "IntegrationTracker",
    "get_tracker",
    "reset_tracker",
]
