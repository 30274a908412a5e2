"""
Cavity Simulator Configuration Module
Loads settings from .env file and defines simulation constants.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# =============================================================================
# Integration Defaults
# =============================================================================
DEFAULT_CUTOFF = int(os.getenv("DEFAULT_CUTOFF", "3"))  # Fock cutoff N (photons 0..N)
PURE_TOLERANCE = float(os.getenv("PURE_TOLERANCE", "1e-9"))  # Schrödinger rtol
MIXED_TOLERANCE = float(os.getenv("MIXED_TOLERANCE", "1e-8"))  # master equation rtol
MAX_RHS_EVALUATIONS = int(os.getenv("MAX_RHS_EVALUATIONS", "2000000"))  # step budget per run
TRAJECTORY_SAMPLES = int(os.getenv("TRAJECTORY_SAMPLES", "201"))  # stored samples per trajectory

# =============================================================================
# Sweep Defaults
# =============================================================================
DEFAULT_JOBS = int(os.getenv("DEFAULT_JOBS", "0"))  # 0 = one worker per core

# =============================================================================
# Laboratory Constants (decay presets)
# =============================================================================
COUPLING_KHZ = float(os.getenv("COUPLING_KHZ", "50"))  # g0 / 2π
ATOM_LIFETIME_MS = float(os.getenv("ATOM_LIFETIME_MS", "30"))  # circular Rydberg lifetime
CAVITY_Q = float(os.getenv("CAVITY_Q", "4.2e10"))
# Mode frequency is not part of the published parameter set; 51.1 GHz is the
# usual circular-Rydberg microwave cavity.
CAVITY_FREQUENCY_GHZ = float(os.getenv("CAVITY_FREQUENCY_GHZ", "51.1"))
G0_SIGMA_FIG2 = float(os.getenv("G0_SIGMA_FIG2", "30"))  # g0·σ of the chirped presets

# =============================================================================
# Paths
# =============================================================================
BASE_DIR = Path(__file__).parent
OUTPUT_DIR = Path(os.getenv("OUTPUT_DIR", str(BASE_DIR / "output")))


def ensure_output_dir() -> Path:
    """Create the output directory on first use."""
    OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
    return OUTPUT_DIR


# =============================================================================
# Validation
# =============================================================================
def validate_config() -> dict:
    """Validate configuration and return status."""
    issues = []

    if DEFAULT_CUTOFF < 2:
        issues.append("DEFAULT_CUTOFF must be >= 2 to hold the two-photon states the gate needs")

    for name, value in (("PURE_TOLERANCE", PURE_TOLERANCE), ("MIXED_TOLERANCE", MIXED_TOLERANCE)):
        if not 0 < value < 1e-3:
            issues.append(f"{name} = {value:g} is outside (0, 1e-3)")

    if MAX_RHS_EVALUATIONS < 1000:
        issues.append("MAX_RHS_EVALUATIONS is too small to finish a single sweep point")

    if TRAJECTORY_SAMPLES < 2:
        issues.append("TRAJECTORY_SAMPLES must be at least 2")

    if DEFAULT_JOBS < 0:
        issues.append("DEFAULT_JOBS must be >= 0")

    for name, value in (
        ("COUPLING_KHZ", COUPLING_KHZ),
        ("ATOM_LIFETIME_MS", ATOM_LIFETIME_MS),
        ("CAVITY_Q", CAVITY_Q),
        ("CAVITY_FREQUENCY_GHZ", CAVITY_FREQUENCY_GHZ),
        ("G0_SIGMA_FIG2", G0_SIGMA_FIG2),
    ):
        if value <= 0:
            issues.append(f"{name} must be positive")

    return {
        "valid": len(issues) == 0,
        "issues": issues,
        "config": {
            "cutoff": DEFAULT_CUTOFF,
            "pure_tolerance": PURE_TOLERANCE,
            "mixed_tolerance": MIXED_TOLERANCE,
            "max_rhs_evaluations": MAX_RHS_EVALUATIONS,
            "trajectory_samples": TRAJECTORY_SAMPLES,
            "jobs": DEFAULT_JOBS,
            "coupling_khz": COUPLING_KHZ,
            "atom_lifetime_ms": ATOM_LIFETIME_MS,
            "cavity_q": CAVITY_Q,
            "cavity_frequency_ghz": CAVITY_FREQUENCY_GHZ,
            "output_dir": str(OUTPUT_DIR),
        }
    }
