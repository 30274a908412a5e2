"""
Adiabatic Module
Instantaneous spectra with branch tracking, resonant and chirp-induced
dynamical phases, the ideal adiabatic gate map, and chirp/coupling solvers
that close the gate phase to a multiple of 2π.

Sector labels: `n` is the gate label used by the phase formulas and the
ideal map; the matching excitation sector is N_exc = n + 2. The two-atom
entangling protocol runs in N_exc = 1, i.e. n = -1.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq, linear_sum_assignment, minimize_scalar

from .dynamics import evolve_state
from .errors import ChirpSolveError, DomainError, QuadratureError, SpectrumTrackingError
from .metrics import input_state, target_state, fidelity
from .model import (
    TIME_JACOBIAN,
    ModelConfig,
    coupling,
    crossing_time,
    detuning,
    hamiltonian,
    hamiltonian_terms,
)
from .statespace import (
    AtomLevel,
    BasisState,
    HilbertSpace,
    StateVector,
    basis_index,
    build_operators,
)


DEGENERACY_TOL = 1e-8
COLLAPSE_TOL = 1e-6
TRACKING_THRESHOLD = 0.9
PHASE_CLOSURE_TOL = 1e-6
QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-12
QUAD_LIMIT = 400
DEFAULT_SPECTRUM_SAMPLES = 2001


def sector_of(n: int) -> int:
    """Excitation number of gate label n."""
    return n + 2


# =============================================================================
# Instantaneous spectrum
# =============================================================================

@dataclass(eq=False)
class EigenCurve:
    """One adiabatic energy branch followed continuously through τ."""
    sector: int
    curve_id: int
    taus: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray  # (samples, sector_dim)
    crossings: list[float] = field(default_factory=list)

    @property
    def samples(self) -> list[tuple[float, float, np.ndarray]]:
        return list(zip(self.taus, self.energies, self.vectors))


def _min_gap(values: np.ndarray) -> float:
    if len(values) < 2:
        return math.inf
    return float(np.min(np.diff(np.sort(values))))


def _sector_spectrum(config: ModelConfig, sector: int, taus: np.ndarray):
    ops = build_operators(config.space)
    terms = hamiltonian_terms(ops)
    idx = config.space.sector_indices(sector)
    if len(idx) == 0:
        raise DomainError(f"Sector {sector} is empty at cutoff {config.cutoff}")
    values, vectors = [], []
    for tau in taus:
        block = hamiltonian(float(tau), config, ops, terms).entries[np.ix_(idx, idx)]
        w, v = np.linalg.eigh(block)
        values.append(w)
        vectors.append(v)
    return np.array(values), np.array(vectors)


def instantaneous_spectrum(
    config: ModelConfig,
    grid: Optional[np.ndarray] = None,
    sector: int = 1,
) -> list[EigenCurve]:
    """
    Eigenvalues of H(τ) on one excitation sector, tracked across the grid.

    Branches are matched by maximal eigenvector overlap. Samples whose
    spectrum is degenerate within DEGENERACY_TOL are flagged as crossings and
    matched by linearly extrapolated energies; matching resumes against the
    last non-degenerate eigenvectors, so branches pass straight through.

    Args:
        config: Model configuration
        grid: Increasing τ samples (default: DEFAULT_SPECTRUM_SAMPLES over the window)
        sector: Excitation number N_exc

    Returns:
        One EigenCurve per eigenvalue, labelled by energy order at the first
        non-degenerate sample
    """
    taus = np.asarray(grid if grid is not None else np.linspace(*config.window, DEFAULT_SPECTRUM_SAMPLES), dtype=float)
    if taus.ndim != 1 or len(taus) < 2 or np.any(np.diff(taus) <= 0):
        raise ValueError("grid must be a strictly increasing 1-D array with at least two samples")
    values, vectors = _sector_spectrum(config, sector, taus)
    count, dim = values.shape

    degenerate = np.array([_min_gap(w) < DEGENERACY_TOL for w in values])
    # whole spectrum at zero: pulses off, nothing to flag
    collapsed = np.max(np.abs(values), axis=1) < COLLAPSE_TOL
    # order[i, k] = eigenpair index at sample i that belongs to branch k
    order = np.tile(np.arange(dim), (count, 1))
    crossings: list[float] = []

    reference: Optional[np.ndarray] = None  # branch vectors at last clean sample
    for i in range(count):
        if degenerate[i]:
            if reference is not None:
                if not collapsed[i]:
                    crossings.append(float(taus[i]))
                if i >= 2:
                    predicted = 2 * values[i - 1, order[i - 1]] - values[i - 2, order[i - 2]]
                else:
                    predicted = values[i - 1, order[i - 1]]
                cost = np.abs(predicted[:, None] - values[i][None, :])
                _, cols = linear_sum_assignment(cost)
                order[i] = cols
            continue
        if reference is None:
            # eigh sorts ascending; earlier degenerate samples keep that order too
            reference = vectors[i]
            continue
        overlaps = np.abs(reference.conj().T @ vectors[i])  # (branch, eigenpair)
        rows, cols = linear_sum_assignment(-overlaps)
        matched = overlaps[rows, cols]
        if matched.min() < TRACKING_THRESHOLD:
            near_crossing = i > 0 and degenerate[i - 1]
            if not near_crossing:
                raise SpectrumTrackingError(
                    f"Eigenvector overlap {matched.min():.3f} below {TRACKING_THRESHOLD} "
                    f"in sector {sector}; refine the grid",
                    float(taus[i]),
                )
            predicted = values[i - 1, order[i - 1]]
            _, cols = linear_sum_assignment(np.abs(predicted[:, None] - values[i][None, :]))
            crossings.append(float(taus[i]))
        order[i] = cols
        reference = vectors[i][:, cols]

    curves = []
    for k in range(dim):
        picks = order[:, k]
        curves.append(EigenCurve(
            sector=sector,
            curve_id=k,
            taus=taus,
            energies=values[np.arange(count), picks],
            vectors=vectors[np.arange(count), :, picks],
            crossings=sorted(set(crossings)),
        ))
    return curves


def crossing_scan(config: ModelConfig, sector: int = 2, grid_points: int = 801) -> tuple[float, float]:
    """
    Locate the exact crossing of the two middle branches of a sector.

    The search runs between the two pulse centres, where both couplings are
    appreciable, widened to reach the predicted crossing when unequal peak
    couplings push it past a centre.

    Returns:
        (τ of minimal middle gap, gap there)
    """
    ops = build_operators(config.space)
    terms = hamiltonian_terms(ops)
    idx = config.space.sector_indices(sector)
    if len(idx) < 2:
        raise DomainError(f"Sector {sector} has fewer than two states at cutoff {config.cutoff}")
    mid = len(idx) // 2

    def middle_gap(tau: float) -> float:
        block = hamiltonian(tau, config, ops, terms).entries[np.ix_(idx, idx)]
        w = np.linalg.eigvalsh(block)
        return float(w[mid] - w[mid - 1])

    pulses = config.pulses
    half = max(pulses.delta, 0.5)
    if pulses.g1 > 0 and pulses.g2 > 0 and pulses.delta > 0:
        half = max(half, abs(crossing_time(pulses.g1, pulses.g2, pulses.delta)) + 0.5)
    taus = np.linspace(-half, half, grid_points)
    gaps = np.array([middle_gap(t) for t in taus])
    best = int(np.argmin(gaps))
    low, high = taus[max(best - 1, 0)], taus[min(best + 1, grid_points - 1)]
    result = minimize_scalar(middle_gap, bounds=(low, high), method="bounded", options={"xatol": 1e-10})
    return float(result.x), float(result.fun)


# =============================================================================
# Dynamical phases
# =============================================================================

def _quad(fn, config: ModelConfig, points: list[float]) -> float:
    start, end = config.window
    inside = sorted(p for p in points if start < p < end)
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, _ = quad(
                fn, start, end,
                points=inside or None,
                epsabs=QUAD_ABS_TOL,
                epsrel=QUAD_REL_TOL,
                limit=QUAD_LIMIT,
            )
        except IntegrationWarning as e:
            raise QuadratureError(f"Adaptive quadrature did not converge: {e}") from e
    return float(value)


def resonant_phase(config: ModelConfig, n: int = -1) -> float:
    """
    Dynamical phase φ_n of the resonant adiabatic state of gate sector n.

    The integrand is the top eigenvalue of the chirp-free sector block; this
    branch starts as (|n+1;e,g> + |n+2;g,g>)/√2 and its phase is the one the
    numerical propagator applies to |n+1;e,g>.
    """
    sector = sector_of(n)
    space = config.space
    if sector < 1 or len(space.sector_indices(sector)) == 0:
        raise DomainError(f"Gate sector n={n} is not available at cutoff {config.cutoff}")
    resonant = config.resonant()
    ops = build_operators(space)
    terms = hamiltonian_terms(ops)
    idx = space.sector_indices(sector)

    def energy(tau: float) -> float:
        block = hamiltonian(tau, resonant, ops, terms).entries[np.ix_(idx, idx)]
        return float(np.linalg.eigvalsh(block)[-1])

    delta = config.pulses.delta
    return TIME_JACOBIAN * _quad(energy, config, [-delta, delta])


def chirp_phase_shift(config: ModelConfig, n: int = -1) -> float:
    """
    Extra phase acquired while atom 1 is chirped with the partner atom dark.

    J ∫ (√(Δ1² + 4kη1²) - 2η1√k) dτ with k = n + 2, evaluated in the
    cancellation-free form Δ1² / (√(Δ1² + 4kη1²) + 2η1√k).
    """
    k = sector_of(n)
    if k < 1:
        raise DomainError(f"Gate sector n={n} has no photon-atom exchange")
    if config.chirps.delta0 == 0:
        return 0.0
    root_k = math.sqrt(k)

    def integrand(tau: float) -> float:
        d = float(detuning(tau, 1, config.chirps))
        eta = abs(float(coupling(tau, 1, config.pulses)))
        denominator = math.sqrt(d * d + 4 * k * eta * eta) + 2 * eta * root_k
        if denominator == 0.0:
            return 0.0
        return d * d / denominator

    tau0 = config.chirps.tau0
    width = config.chirps.sigma_s
    return TIME_JACOBIAN * _quad(integrand, config, [-tau0 - 3 * width, -tau0, -tau0 + 3 * width])


@dataclass(frozen=True)
class PhasePair:
    """Resonant phase and chirp-induced shift of one gate sector."""
    phi_n: float
    shift: float

    @property
    def phi_tilde(self) -> float:
        return self.phi_n + self.shift

    @property
    def turns(self) -> float:
        return self.phi_tilde / (2 * math.pi)


def adiabatic_phases(config: ModelConfig, n: int = -1) -> PhasePair:
    return PhasePair(resonant_phase(config, n), chirp_phase_shift(config, n))


# =============================================================================
# Ideal adiabatic map
# =============================================================================

Phases = Union[float, Mapping[int, float]]


def _phase_for(phases: Phases, n: int) -> float:
    if isinstance(phases, Mapping):
        if n not in phases:
            raise DomainError(f"No phase supplied for gate sector n={n}")
        return float(phases[n])
    return float(phases)


def ideal_map_matrix(space: HilbertSpace, phases: Phases) -> tuple[np.ndarray, np.ndarray]:
    """
    Adiabatic gate as a matrix on the full space.

    |n;e,e> and |0;g,g> are fixed, |m;g,e> -> -|m;e,g>, and
    {|m;e,g>, |m+1;g,g>} rotate by φ̃_{m-1} into {|m;g,e>, |m+1;g,g>}.

    Returns:
        (matrix, domain) where domain flags the columns whose image fits
        below the cutoff; the matrix is unitary on those columns
    """
    dim = space.dim
    matrix = np.zeros((dim, dim), dtype=complex)
    domain = np.ones(dim, dtype=bool)
    g, e = AtomLevel.GROUND, AtomLevel.EXCITED

    for b in space.basis():
        col = basis_index(b, space)
        m = b.n
        if (b.s1, b.s2) == (e, e) or (b.excitations == 0):
            matrix[col, col] = 1.0
        elif (b.s1, b.s2) == (g, e):
            matrix[basis_index(BasisState(m, e, g), space), col] = -1.0
        elif (b.s1, b.s2) == (e, g):
            if m + 1 > space.cutoff:
                domain[col] = False
                continue
            phi = _phase_for(phases, m - 1)
            matrix[basis_index(BasisState(m, g, e), space), col] = math.cos(phi)
            matrix[basis_index(BasisState(m + 1, g, g), space), col] = -1j * math.sin(phi)
        else:  # |m;g,g> with m >= 1
            phi = _phase_for(phases, m - 2)
            matrix[basis_index(BasisState(m - 1, g, e), space), col] = -1j * math.sin(phi)
            matrix[col, col] = math.cos(phi)
    return matrix, domain


def ideal_map(state: StateVector, phi_tilde: Phases) -> StateVector:
    """Apply the adiabatic gate to a state with at least one photon of headroom."""
    space = state.space
    top = slice(4 * space.cutoff, space.dim)
    if np.any(np.abs(state.amplitudes[top]) > 1e-14):
        raise DomainError(
            f"State has support on {space.cutoff} photons; the gate needs one photon of headroom"
        )
    matrix, _ = ideal_map_matrix(space, phi_tilde)
    return StateVector(space, matrix @ state.amplitudes)


def predicted_fidelity(phi_tilde: float) -> float:
    """Gate fidelity |3 + cos φ̃|/4 for the two-atom product input."""
    return abs(3 + math.cos(phi_tilde)) / 4


# =============================================================================
# Phase closure
# =============================================================================

def _closure_turns(phi: float, m: Optional[int]) -> int:
    nearest = round(phi / (2 * math.pi))
    if m is None:
        if nearest >= 1 and abs(phi - 2 * math.pi * nearest) < PHASE_CLOSURE_TOL:
            return nearest
        return max(1, math.ceil(phi / (2 * math.pi)))
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return m


def solve_chirp_amplitude(
    config: ModelConfig,
    m: Optional[int] = None,
    n: int = -1,
    delta0_max: Optional[float] = None,
) -> float:
    """
    Chirp amplitude Δ0 that brings φ̃_n to 2mπ.

    Args:
        config: Base configuration (its Δ0 is ignored)
        m: Target number of turns (default: smallest with 2mπ >= φ_n)
        n: Gate sector label
        delta0_max: Upper end of the search bracket (default: 1.5·g0)

    Returns:
        Δ0 in units of 1/σ
    """
    phi = resonant_phase(config, n)
    turns = _closure_turns(phi, m)
    target = 2 * math.pi * turns
    if abs(phi - target) < PHASE_CLOSURE_TOL:
        return 0.0
    upper = delta0_max if delta0_max is not None else 1.5 * config.g0
    attainable = (phi, phi + chirp_phase_shift(config.with_chirp(upper), n))
    if target < phi:
        raise ChirpSolveError(f"Target 2π·{turns} lies below the resonant phase", attainable)
    if attainable[1] < target:
        raise ChirpSolveError(f"Target 2π·{turns} not reachable with Δ0 <= {upper:g}", attainable)

    def residual(delta0: float) -> float:
        return phi + chirp_phase_shift(config.with_chirp(delta0), n) - target

    return float(brentq(residual, 0.0, upper, xtol=1e-12, rtol=1e-12, maxiter=200))


def simulated_fidelity(config: ModelConfig) -> float:
    """Fidelity of the closed-system output of the product input with the target Bell-type state."""
    space = config.space
    final = evolve_state(input_state(space), config, samples=2).final
    return fidelity(final, target_state(space))


def optimize_chirp_amplitude(
    config: ModelConfig,
    bracket: Optional[tuple[float, float]] = None,
    xatol: Optional[float] = None,
) -> tuple[float, float]:
    """
    Chirp amplitude maximizing the simulated gate fidelity.

    Args:
        config: Base configuration (its Δ0 is ignored)
        bracket: (low, high) Δ0 interval holding a single peak
            (default: ±15% around the phase-closure prediction)
        xatol: Absolute Δ0 tolerance (default: 1e-4·g0)

    Returns:
        (Δ0, fidelity at Δ0)
    """
    if bracket is None:
        guess = solve_chirp_amplitude(config)
        bracket = (0.85 * guess, 1.15 * guess) if guess > 0 else (0.0, 0.1 * config.g0)
    low, high = bracket
    if not low < high:
        raise DomainError(f"bracket must satisfy low < high, got {bracket}")
    result = minimize_scalar(
        lambda d0: -simulated_fidelity(config.with_chirp(d0)),
        bounds=(low, high),
        method="bounded",
        options={"xatol": xatol or 1e-4 * config.g0},
    )
    return float(result.x), float(-result.fun)


def calibrate_resonant_coupling(
    config: ModelConfig,
    near: float,
    refine: bool = False,
    n: int = -1,
) -> float:
    """
    Peak coupling closest to `near` whose resonant phase is a whole number of turns.

    The resonant phase is linear in the peak coupling at fixed g2/g1, so the
    closing coupling follows from one quadrature; `refine` then maximizes the
    simulated gate fidelity within a quarter turn of that estimate.

    Returns:
        The calibrated peak coupling g0 (1/σ); g2/g1 is preserved
    """
    if near <= 0:
        raise DomainError(f"near must be positive, got {near}")
    ratio = config.pulses.g2 / config.pulses.g1
    base = config.resonant().with_couplings(near, near * ratio)
    phi = resonant_phase(base, n)
    turns = max(1, round(phi / (2 * math.pi)))
    estimate = near * 2 * math.pi * turns / phi
    if not refine:
        return estimate
    window = estimate * (math.pi / 2) / (2 * math.pi * turns)
    result = minimize_scalar(
        lambda g0: -simulated_fidelity(base.with_couplings(g0, g0 * ratio)),
        bounds=(estimate - window, estimate + window),
        method="bounded",
        options={"xatol": 1e-6 * estimate},
    )
    return float(result.x)
