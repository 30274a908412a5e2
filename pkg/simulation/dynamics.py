"""
Dynamics Module
Integrates the Schrödinger equation and the zero-temperature Lindblad
master equation in dimensionless time, and extracts sector propagators.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import sparse
from scipy.integrate import solve_ivp

from config import MAX_RHS_EVALUATIONS, MIXED_TOLERANCE, TRAJECTORY_SAMPLES

from .errors import DomainError, IntegrationError, SpaceMismatchError
from .model import (
    TIME_JACOBIAN,
    ModelConfig,
    coefficients,
    hamiltonian_terms,
)
from .statespace import (
    BasisState,
    DensityMatrix,
    Operator,
    OperatorSet,
    StateVector,
    basis_unindex,
    build_operators,
)


State = Union[StateVector, DensityMatrix]

# Embedded Runge-Kutta 8(5,3) pair with error-controlled step selection
INTEGRATOR_METHOD = "DOP853"
ABSOLUTE_TOL_RATIO = 1e-2


@dataclass(eq=False)
class Trajectory:
    """Sampled solution of one integration run."""
    times: np.ndarray
    states: list[State]
    rhs_evaluations: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.states):
            raise ValueError("Trajectory needs one state per sample time")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("Trajectory times must be strictly increasing")

    @property
    def final(self) -> State:
        return self.states[-1]

    @property
    def is_mixed(self) -> bool:
        return isinstance(self.final, DensityMatrix)


class _CountedRHS:
    """Right-hand side wrapper enforcing the evaluation budget."""

    def __init__(self, fn: Callable[[float, np.ndarray], np.ndarray], budget: int):
        self.fn = fn
        self.budget = budget
        self.calls = 0
        self.last_tau = float("nan")

    def __call__(self, tau: float, y: np.ndarray) -> np.ndarray:
        self.calls += 1
        if self.calls > self.budget:
            raise IntegrationError(
                f"Right-hand side budget of {self.budget} evaluations exhausted", self.last_tau
            )
        self.last_tau = tau
        return self.fn(tau, y)


def _sample_times(config: ModelConfig, samples: Optional[int]) -> np.ndarray:
    count = max(2, samples or TRAJECTORY_SAMPLES)
    return np.linspace(config.window[0], config.window[1], count)


def _integrate(
    fn: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    config: ModelConfig,
    rtol: float,
    times: np.ndarray,
) -> tuple[np.ndarray, int]:
    rhs = _CountedRHS(fn, MAX_RHS_EVALUATIONS)
    rhs.last_tau = config.window[0]
    solution = solve_ivp(
        rhs,
        config.window,
        y0,
        method=INTEGRATOR_METHOD,
        t_eval=times,
        rtol=rtol,
        atol=rtol * ABSOLUTE_TOL_RATIO,
    )
    if not solution.success:
        last = float(solution.t[-1]) if len(solution.t) else rhs.last_tau
        raise IntegrationError(f"Integrator stopped: {solution.message}", last)
    return solution.y, solution.nfev


def evolve_state(
    psi0: StateVector,
    config: ModelConfig,
    samples: Optional[int] = None,
) -> Trajectory:
    """
    Integrate dψ/dτ = -i J H(τ) ψ across the configured window.

    Args:
        psi0: Normalized initial state on the config's space
        config: Closed-system configuration (no decay)
        samples: Number of stored samples (default: config.TRAJECTORY_SAMPLES)

    Returns:
        Trajectory of StateVector samples
    """
    if config.has_decay:
        raise DomainError("evolve_state is the closed-system path; use evolve_density with decay")
    if psi0.space != config.space:
        raise SpaceMismatchError(
            f"State cutoff {psi0.space.cutoff} does not match config cutoff {config.cutoff}"
        )
    if not psi0.is_normalized():
        raise DomainError(f"Initial state is not normalized (norm {psi0.norm():.12g})")

    generators = [-1j * TIME_JACOBIAN * t for t in hamiltonian_terms(build_operators(config.space)).as_list()]

    def rhs(tau: float, psi: np.ndarray) -> np.ndarray:
        out = np.zeros_like(psi)
        for c, g in zip(coefficients(tau, config), generators):
            if c != 0.0:
                out += c * (g @ psi)
        return out

    times = _sample_times(config, samples)
    ys, nfev = _integrate(rhs, psi0.amplitudes, config, config.tol, times)
    states = [StateVector(psi0.space, ys[:, i]) for i in range(ys.shape[1])]
    return Trajectory(times, states, rhs_evaluations=nfev, metadata={"kind": "pure"})


def lindblad_operators(config: ModelConfig, ops: OperatorSet) -> list[tuple[float, Operator]]:
    """Jump operators with their rates: cavity loss, then emission of each atom."""
    return [
        (config.gamma_c, ops.a),
        (config.gamma_s, ops.sigma_minus[0]),
        (config.gamma_s, ops.sigma_minus[1]),
    ]


def _commutator_superop(h: np.ndarray) -> sparse.csr_matrix:
    """-i[h, ·] acting on row-major vec(ρ)."""
    eye = sparse.identity(h.shape[0], dtype=complex, format="csr")
    hs = sparse.csr_matrix(h)
    return (-1j * (sparse.kron(hs, eye) - sparse.kron(eye, hs.T))).tocsr()


def _dissipator_superop(c: np.ndarray) -> sparse.csr_matrix:
    """cρc† - {c†c, ρ}/2 acting on row-major vec(ρ)."""
    eye = sparse.identity(c.shape[0], dtype=complex, format="csr")
    cs = sparse.csr_matrix(c)
    cdc = cs.conj().T @ cs
    return (sparse.kron(cs, cs.conj()) - 0.5 * (sparse.kron(cdc, eye) + sparse.kron(eye, cdc.T))).tocsr()


def evolve_density(
    rho0: Union[DensityMatrix, StateVector],
    config: ModelConfig,
    samples: Optional[int] = None,
    tol: Optional[float] = None,
) -> Trajectory:
    """
    Integrate dρ/dτ = J(-i[H, ρ] + L_s(ρ) + L_c(ρ)) on the vectorized density matrix.

    Args:
        rho0: Initial state (pure states are promoted to |ψ><ψ|)
        config: Configuration including decay rates (zero is allowed)
        samples: Number of stored samples
        tol: Relative tolerance (default: the looser of config.tol and MIXED_TOLERANCE)

    Returns:
        Trajectory of DensityMatrix samples
    """
    if isinstance(rho0, StateVector):
        rho0 = rho0.to_density()
    if rho0.space != config.space:
        raise SpaceMismatchError("Initial density matrix does not live on the config's space")
    issues = rho0.validate()
    if issues:
        raise DomainError(f"Initial density matrix is invalid: {', '.join(issues)}")

    ops = build_operators(config.space)
    dim = config.space.dim
    pieces = [TIME_JACOBIAN * _commutator_superop(t) for t in hamiltonian_terms(ops).as_list()]
    dissipator = sparse.csr_matrix((dim * dim, dim * dim), dtype=complex)
    for rate, jump in lindblad_operators(config, ops):
        if rate > 0:
            dissipator = dissipator + TIME_JACOBIAN * rate * _dissipator_superop(jump.entries)

    def rhs(tau: float, vec: np.ndarray) -> np.ndarray:
        out = dissipator @ vec
        for c, piece in zip(coefficients(tau, config), pieces):
            if c != 0.0:
                out += c * (piece @ vec)
        return out

    rtol = tol or max(config.tol, MIXED_TOLERANCE)
    times = _sample_times(config, samples)
    ys, nfev = _integrate(rhs, rho0.entries.reshape(-1), config, rtol, times)
    states = []
    for i in range(ys.shape[1]):
        rho = ys[:, i].reshape(dim, dim)
        states.append(DensityMatrix(config.space, 0.5 * (rho + rho.conj().T)))
    return Trajectory(times, states, rhs_evaluations=nfev, metadata={"kind": "mixed", "rtol": rtol})


def evolve(state: State, config: ModelConfig, samples: Optional[int] = None) -> Trajectory:
    """Pure-state integration when possible, master equation otherwise."""
    if isinstance(state, StateVector) and not config.has_decay:
        return evolve_state(state, config, samples)
    return evolve_density(state, config, samples)


@dataclass(frozen=True, eq=False)
class SectorPropagator:
    """Numerical propagator restricted to one excitation sector."""
    sector: int
    basis: tuple[BasisState, ...]
    entries: np.ndarray

    def column(self, b: BasisState) -> np.ndarray:
        return self.entries[:, self.basis.index(b)]

    def element(self, out: BasisState, into: BasisState) -> complex:
        """<out|U|into>."""
        return complex(self.entries[self.basis.index(out), self.basis.index(into)])

    def unitarity_error(self) -> float:
        k = self.entries.shape[0]
        return float(np.linalg.norm(self.entries.conj().T @ self.entries - np.eye(k)))


def extract_propagator(config: ModelConfig, sector: int) -> SectorPropagator:
    """
    Evolve every bare state of one excitation sector and collect the columns.

    Args:
        config: Closed-system configuration
        sector: Excitation number a†a + Σσ+σ- labelling the block

    Returns:
        SectorPropagator in basis-index order
    """
    space = config.space
    indices = space.sector_indices(sector)
    if len(indices) == 0:
        raise DomainError(f"Sector {sector} is empty at cutoff {space.cutoff}")
    basis = tuple(basis_unindex(int(i), space) for i in indices)
    columns = []
    for b in basis:
        final = evolve_state(StateVector.from_basis(b, space), config, samples=2).final
        columns.append(final.amplitudes[indices])
    return SectorPropagator(sector=sector, basis=basis, entries=np.column_stack(columns))


def sector_weights(state: State) -> dict[int, float]:
    """Probability carried by each excitation sector."""
    space = state.space
    if isinstance(state, StateVector):
        populations = np.abs(state.amplitudes) ** 2
    else:
        populations = np.real(np.diag(state.entries))
    numbers = space.excitation_numbers()
    return {int(k): float(populations[numbers == k].sum()) for k in np.unique(numbers)}


def sector_leakage(trajectory: Trajectory) -> float:
    """Largest probability found in sectors that were empty at the first sample."""
    initial = sector_weights(trajectory.states[0])
    empty = [k for k, w in initial.items() if w == 0.0]
    worst = 0.0
    for state in trajectory.states[1:]:
        weights = sector_weights(state)
        worst = max(worst, sum(weights[k] for k in empty))
    return worst
