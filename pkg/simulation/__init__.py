"""
Cavity Entanglement Simulator

Two atoms crossing a single-mode cavity with delayed Gaussian couplings:
- State space: truncated Fock space ⊗ two qubits, operators, partial traces
- Model: pulses, Stark chirps, spatial couplings, H(τ)
- Dynamics: Schrödinger and zero-temperature master-equation integration
- Adiabatic: tracked spectra, gate phases, ideal gate map, phase closure
- Metrics: fidelity, C3 and Wootters concurrence, photon statistics
"""

__version__ = "0.1.0"

from .errors import (
    SimulationError,
    DomainError,
    SpaceMismatchError,
    IntegrationError,
    SpectrumTrackingError,
    QuadratureError,
    ChirpSolveError,
    ConfigError,
)
from .statespace import (
    AtomLevel,
    Subsystem,
    BasisState,
    HilbertSpace,
    Operator,
    StateVector,
    DensityMatrix,
    build_operators,
    partial_trace,
    purity,
)
from .model import PulseParams, ChirpParams, SpatialConfig, ModelConfig
from .dynamics import Trajectory, evolve, evolve_state, evolve_density, extract_propagator
from .adiabatic import (
    EigenCurve,
    PhasePair,
    instantaneous_spectrum,
    resonant_phase,
    chirp_phase_shift,
    ideal_map,
    predicted_fidelity,
    solve_chirp_amplitude,
)
from .metrics import (
    TwoQubitDensity,
    fidelity,
    concurrence_c3,
    wootters_concurrence,
    mean_photon,
    factorization_residual,
)

__all__ = [
    "__version__",
    "SimulationError",
    "DomainError",
    "SpaceMismatchError",
    "IntegrationError",
    "SpectrumTrackingError",
    "QuadratureError",
    "ChirpSolveError",
    "ConfigError",
    "AtomLevel",
    "Subsystem",
    "BasisState",
    "HilbertSpace",
    "Operator",
    "StateVector",
    "DensityMatrix",
    "build_operators",
    "partial_trace",
    "purity",
    "PulseParams",
    "ChirpParams",
    "SpatialConfig",
    "ModelConfig",
    "Trajectory",
    "evolve",
    "evolve_state",
    "evolve_density",
    "extract_propagator",
    "EigenCurve",
    "PhasePair",
    "instantaneous_spectrum",
    "resonant_phase",
    "chirp_phase_shift",
    "ideal_map",
    "predicted_fidelity",
    "solve_chirp_amplitude",
    "TwoQubitDensity",
    "fidelity",
    "concurrence_c3",
    "wootters_concurrence",
    "mean_photon",
    "factorization_residual",
]
