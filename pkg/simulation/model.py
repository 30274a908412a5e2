"""
Model Module
Gaussian coupling pulses, Stark chirps, spatial coupling amplitudes,
laboratory unit conversions, and assembly of the time-dependent Hamiltonian.

Time is the dimensionless τ = t/(2σ) with σ the pulse transit time; every
rate (couplings, chirp amplitude, decay) is stored in units of 1/σ.
"""

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from config import DEFAULT_CUTOFF, PURE_TOLERANCE

from .errors import DomainError, SpaceMismatchError
from .statespace import HilbertSpace, Operator, OperatorSet


# dt = J dτ: multiplies every generator and phase integral in τ
TIME_JACOBIAN = 2.0

# Pulses are below e^-36 of their peak this far outside the delay
WINDOW_MARGIN = 6.0


@dataclass(frozen=True)
class PulseParams:
    """Peak couplings g1, g2 (1/σ) and the half-delay δ between the pulses."""
    g1: float
    g2: float
    delta: float

    def __post_init__(self):
        if not self.g1 > 0:
            raise DomainError(f"g1 must be positive, got {self.g1}")
        if self.delta < 0:
            raise DomainError(f"delta must be >= 0, got {self.delta}")


@dataclass(frozen=True)
class ChirpParams:
    """Stark chirp amplitude Δ0 (1/σ), center τ0 and width σ_s."""
    delta0: float = 0.0
    tau0: float = 2.0
    sigma_s: float = 0.2

    def __post_init__(self):
        if not self.sigma_s > 0:
            raise DomainError(f"sigma_s must be positive, got {self.sigma_s}")
        if self.tau0 < 0:
            raise DomainError(f"tau0 must be >= 0, got {self.tau0}")


@dataclass(frozen=True)
class SpatialConfig:
    """Atom placement inside a standing-wave Gaussian mode."""
    g0: float
    z1: float
    z2: float
    y1: float = 0.0
    y2: float = 0.0
    wavelength: float = 1.0
    w0: float = 1.0

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError(f"wavelength must be positive, got {self.wavelength}")
        if not self.w0 > 0:
            raise DomainError(f"w0 must be positive, got {self.w0}")


def default_window(delta: float, tau0: float = 0.0, sigma_s: float = 0.0) -> tuple[float, float]:
    """Symmetric window that contains both pulses and both chirps."""
    half = max(delta + WINDOW_MARGIN, tau0 + WINDOW_MARGIN * sigma_s)
    return (-half, half)


@dataclass(frozen=True)
class ModelConfig:
    """Everything needed to integrate one run."""
    pulses: PulseParams
    chirps: ChirpParams = ChirpParams()
    cutoff: int = DEFAULT_CUTOFF
    gamma_c: float = 0.0
    gamma_s: float = 0.0
    window: Optional[tuple[float, float]] = None
    tol: float = PURE_TOLERANCE

    def __post_init__(self):
        if self.cutoff < 0:
            raise DomainError(f"cutoff must be >= 0, got {self.cutoff}")
        if self.gamma_c < 0 or self.gamma_s < 0:
            raise DomainError(
                f"decay rates must be >= 0, got gamma_c={self.gamma_c}, gamma_s={self.gamma_s}"
            )
        if not self.tol > 0:
            raise DomainError(f"tol must be positive, got {self.tol}")
        window = self.window
        if window is None:
            window = default_window(self.pulses.delta, self.chirps.tau0, self.chirps.sigma_s)
        window = (float(window[0]), float(window[1]))
        if not window[0] < window[1]:
            raise DomainError(f"window start must precede its end, got {window}")
        object.__setattr__(self, "window", window)

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace(self.cutoff)

    @property
    def g0(self) -> float:
        """Peak coupling of the stronger pulse."""
        return max(abs(self.pulses.g1), abs(self.pulses.g2))

    @property
    def has_decay(self) -> bool:
        return self.gamma_c > 0 or self.gamma_s > 0

    def with_couplings(self, g1: float, g2: float) -> "ModelConfig":
        return replace(self, pulses=replace(self.pulses, g1=g1, g2=g2))

    def with_chirp(self, delta0: float) -> "ModelConfig":
        return replace(self, chirps=replace(self.chirps, delta0=delta0))

    def with_decay(self, gamma_c: float = 0.0, gamma_s: float = 0.0) -> "ModelConfig":
        return replace(self, gamma_c=gamma_c, gamma_s=gamma_s)

    def resonant(self) -> "ModelConfig":
        return self.with_chirp(0.0)

    def to_dict(self) -> dict:
        return {
            "g1": self.pulses.g1,
            "g2": self.pulses.g2,
            "delta": self.pulses.delta,
            "delta0": self.chirps.delta0,
            "tau0": self.chirps.tau0,
            "sigma_s": self.chirps.sigma_s,
            "cutoff": self.cutoff,
            "gamma_c": self.gamma_c,
            "gamma_s": self.gamma_s,
            "window": list(self.window),
            "tol": self.tol,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        return cls(
            pulses=PulseParams(data["g1"], data["g2"], data["delta"]),
            chirps=ChirpParams(data["delta0"], data["tau0"], data["sigma_s"]),
            cutoff=int(data["cutoff"]),
            gamma_c=data["gamma_c"],
            gamma_s=data["gamma_s"],
            window=tuple(data["window"]),
            tol=data["tol"],
        )


def _check_atom(j: int):
    if j not in (1, 2):
        raise ValueError(f"Atom index must be 1 or 2, got {j}")


def coupling(tau, j: int, p: PulseParams):
    """Coupling η_j(τ): Gaussian pulse of atom j, centred at ∓δ."""
    _check_atom(j)
    if j == 1:
        return p.g1 * np.exp(-(tau + p.delta) ** 2)
    return p.g2 * np.exp(-(tau - p.delta) ** 2)


def detuning(tau, j: int, c: ChirpParams):
    """Stark chirp Δ_j(τ); atom 2 is shifted with the opposite sign."""
    _check_atom(j)
    if j == 1:
        return c.delta0 * np.exp(-((tau + c.tau0) / c.sigma_s) ** 2)
    return -c.delta0 * np.exp(-((tau - c.tau0) / c.sigma_s) ** 2)


def spatial_amplitudes(s: SpatialConfig) -> tuple[float, float]:
    """Peak couplings of two atoms at axial positions z_j and transverse offsets y_j."""
    k = 2 * math.pi / s.wavelength

    def amplitude(z: float, y: float) -> float:
        return s.g0 * math.cos(k * z) * math.exp(-(y ** 2) / (2 * s.w0) ** 2)

    return amplitude(s.z1, s.y1), amplitude(s.z2, s.y2)


@dataclass(frozen=True, eq=False)
class HamiltonianTerms:
    """Static operators multiplying the time-dependent coefficients.

    H(τ) = Δ1 z1 + Δ2 z2 + η1 x1 + η2 x2 with z_j = σz^j/2 and
    x_j = a†σ-^j + aσ+^j.
    """
    space: HilbertSpace
    z1: np.ndarray
    z2: np.ndarray
    x1: np.ndarray
    x2: np.ndarray

    def as_list(self) -> list[np.ndarray]:
        return [self.z1, self.z2, self.x1, self.x2]


def hamiltonian_terms(ops: OperatorSet) -> HamiltonianTerms:
    exchange = [
        (ops.adag @ ops.sigma_minus[j] + ops.a @ ops.sigma_plus[j]).entries for j in (0, 1)
    ]
    return HamiltonianTerms(
        space=ops.space,
        z1=0.5 * ops.sigma_z[0].entries,
        z2=0.5 * ops.sigma_z[1].entries,
        x1=exchange[0],
        x2=exchange[1],
    )


def coefficients(tau: float, config: ModelConfig) -> tuple[float, float, float, float]:
    """(Δ1, Δ2, η1, η2) at τ, in HamiltonianTerms order."""
    return (
        float(detuning(tau, 1, config.chirps)),
        float(detuning(tau, 2, config.chirps)),
        float(coupling(tau, 1, config.pulses)),
        float(coupling(tau, 2, config.pulses)),
    )


def hamiltonian(
    tau: float,
    config: ModelConfig,
    ops: OperatorSet,
    terms: Optional[HamiltonianTerms] = None,
) -> Operator:
    """Rotating-wave Hamiltonian H(τ) in units of 1/σ."""
    if ops.space.cutoff != config.cutoff:
        raise SpaceMismatchError(
            f"Operator set has cutoff {ops.space.cutoff}, config expects {config.cutoff}"
        )
    terms = terms or hamiltonian_terms(ops)
    entries = sum(c * t for c, t in zip(coefficients(tau, config), terms.as_list()))
    return Operator(ops.space, entries)


def crossing_time(g1: float, g2: float, delta: float) -> float:
    """Time of the exact level crossing where η1(τ) = η2(τ)."""
    if g1 <= 0 or g2 <= 0:
        raise DomainError(f"crossing_time needs positive couplings, got g1={g1}, g2={g2}")
    if delta <= 0:
        raise DomainError(f"crossing_time needs delta > 0, got {delta}")
    return math.log(g1 / g2) / (4 * delta)


def dimensionless_from_physical(
    w0: float,
    v: float,
    dt: float,
    x0: float,
    length: float,
) -> tuple[float, float, float, float]:
    """
    Convert a beam geometry to (σ, δ, τ0, σ_s).

    Args:
        w0: Mode half-waist
        v: Atom velocity (same length unit per second)
        dt: Delay between the two atoms entering the mode
        x0: Offset of the Stark field from the mode axis
        length: Half-length L of the Stark field region

    Returns:
        Tuple of transit time σ (s), half-delay δ, chirp center τ0, chirp width σ_s
    """
    for name, value in (("w0", w0), ("v", v), ("dt", dt), ("x0", x0), ("length", length)):
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")
    sigma = w0 / v
    delta = dt / (2 * sigma)
    tau0 = (v * dt + x0) / (2 * w0)
    sigma_s = length / w0
    return sigma, delta, tau0, sigma_s


def rates_from_physical(
    g0_hz: float,
    lifetime_s: float,
    quality: float,
    mode_hz: float,
    g0_sigma: float,
) -> dict:
    """
    Map laboratory numbers onto dimensionless rates.

    Args:
        g0_hz: Vacuum Rabi coupling g0/2π in Hz
        lifetime_s: Atomic lifetime T_at in seconds
        quality: Cavity quality factor Q
        mode_hz: Cavity mode frequency in Hz
        g0_sigma: Target coupling g0·σ (sets the transit time σ)

    Returns:
        Dict with sigma (s), g0 (1/σ), gamma_s (Γσ) and gamma_c (γσ)
    """
    for name, value in (
        ("g0_hz", g0_hz),
        ("lifetime_s", lifetime_s),
        ("quality", quality),
        ("mode_hz", mode_hz),
        ("g0_sigma", g0_sigma),
    ):
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")
    sigma = g0_sigma / (2 * math.pi * g0_hz)
    cavity_rate = 2 * math.pi * mode_hz / quality
    return {
        "sigma": sigma,
        "g0": g0_sigma,
        "gamma_s": sigma / lifetime_s,
        "gamma_c": cavity_rate * sigma,
    }


def pulse_overlap(config: ModelConfig, samples: int = 4001) -> float:
    """
    Largest product of one atom's chirp with the other atom's coupling,
    relative to Δ0·g0. Zero means the chirps act only while the partner
    atom is dark.
    """
    if config.chirps.delta0 == 0:
        return 0.0
    tau = np.linspace(*config.window, samples)
    cross = np.maximum(
        np.abs(detuning(tau, 1, config.chirps) * coupling(tau, 2, config.pulses)),
        np.abs(detuning(tau, 2, config.chirps) * coupling(tau, 1, config.pulses)),
    )
    return float(cross.max() / (abs(config.chirps.delta0) * config.g0))
