"""
Metrics Module
Fidelity, multipartite and two-qubit concurrence, photon statistics and
the reference states of the two-atom entangling protocol.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import curve_fit

from .errors import DomainError, SpaceMismatchError
from .statespace import (
    ALL_SUBSYSTEMS,
    ATOMS,
    DensityMatrix,
    HilbertSpace,
    StateVector,
    Subsystem,
    partial_trace,
    purity,
    tensor_state,
)


State = Union[StateVector, DensityMatrix]

POSITIVITY_TOL = 1e-8
SIGMA_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


@dataclass(frozen=True, eq=False)
class TwoQubitDensity:
    """Atom-pair density matrix in the |s1 s2> product basis."""
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (4, 4):
            raise SpaceMismatchError(f"Two-qubit state must be 4x4, got {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_pure(cls, amplitudes: np.ndarray) -> "TwoQubitDensity":
        psi = np.asarray(amplitudes, dtype=complex).reshape(4)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    def validate(self) -> list[str]:
        rho = DensityMatrix(None, self.entries, subsystems=ATOMS, dims=(2, 2))
        return rho.validate()


def input_state(space: HilbertSpace) -> StateVector:
    """Vacuum cavity with both atoms in (|g> + |e>)/√2."""
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    return tensor_state(0, plus, plus, space)


def target_state(space: HilbertSpace) -> StateVector:
    """Maximally entangled atom pair (|gg> + |ge> - |eg> + |ee>)/2 with the cavity empty."""
    amplitudes = np.zeros(space.dim, dtype=complex)
    # index = 2*s1 + s2 inside the vacuum block
    amplitudes[0:4] = [0.5, 0.5, -0.5, 0.5]
    return StateVector(space, amplitudes)


def fidelity(state: State, target: StateVector) -> float:
    """Overlap magnitude |<t|ψ>| for pure states, √<t|ρ|t> for mixed ones."""
    if isinstance(state, StateVector):
        return float(min(1.0, abs(state.overlap(target))))
    if state.space != target.space:
        raise SpaceMismatchError("Density matrix and target live on different spaces")
    t = target.amplitudes
    value = float(np.real(np.vdot(t, state.entries @ t)))
    return math.sqrt(min(1.0, max(0.0, value)))


def concurrence_c3(psi: StateVector) -> float:
    """Pure-state tripartite concurrence √(3 - Σ tr ρ_i²) over the three marginals."""
    total = sum(purity(partial_trace(psi, [s])) for s in ALL_SUBSYSTEMS)
    return math.sqrt(max(0.0, 3.0 - total))


def pure_concurrence(amplitudes: np.ndarray) -> float:
    """Concurrence 2|ad - bc| of a pure two-qubit state (a, b, c, d)."""
    a, b, c, d = np.asarray(amplitudes, dtype=complex).reshape(4) / np.linalg.norm(amplitudes)
    return float(2 * abs(a * d - b * c))


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (matrix + matrix.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def wootters_concurrence(rho: TwoQubitDensity) -> float:
    """
    Two-qubit mixed-state concurrence max{0, λ1 - λ2 - λ3 - λ4}.

    The λ_i (square roots of the eigenvalues of ρ·(σy⊗σy)ρ*(σy⊗σy), in
    descending order) are taken as the singular values of √ρ*·(σy⊗σy)·√ρ,
    which avoids square roots of eigenvalues that are negative by noise.
    """
    issues = rho.validate()
    if issues:
        raise DomainError(f"Not a valid two-qubit density matrix: {', '.join(issues)}")
    root = _psd_sqrt(rho.entries)
    singular = np.linalg.svd(root.conj() @ SIGMA_YY @ root, compute_uv=False)
    lam = np.sort(np.clip(singular, 0.0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def two_qubit_state(state: State) -> TwoQubitDensity:
    """Reduced state of the atom pair."""
    return TwoQubitDensity(partial_trace(state, ATOMS).entries)


def _photon_numbers(space: HilbertSpace) -> np.ndarray:
    return np.arange(space.dim) // 4


def mean_photon(state: State) -> float:
    """<a†a>."""
    numbers = _photon_numbers(state.space)
    if isinstance(state, StateVector):
        return float(np.sum(numbers * np.abs(state.amplitudes) ** 2))
    return float(np.real(np.sum(numbers * np.diag(state.entries))))


def factorization_residual(state: State) -> float:
    """Frobenius distance between ρ and |0><0| ⊗ tr_cavity(ρ)."""
    rho = state.to_density() if isinstance(state, StateVector) else state
    atoms = partial_trace(rho, ATOMS)
    product = np.zeros_like(rho.entries)
    product[0:4, 0:4] = atoms.entries
    return float(np.linalg.norm(rho.entries - product))


def purity_atoms(state: State) -> float:
    return purity(partial_trace(state, ATOMS))


def cavity_purity(state: State) -> float:
    return purity(partial_trace(state, [Subsystem.CAVITY]))


def exponential_fit(x, y) -> tuple[float, float, float]:
    """
    Least-squares fit of y = A·exp(-k·x).

    Returns:
        (A, k, R²)
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 3:
        raise ValueError("exponential_fit needs at least three matching samples")

    positive = y > 0
    if positive.sum() >= 2:
        slope, intercept = np.polyfit(x[positive], np.log(y[positive]), 1)
        guess = (math.exp(intercept), -slope)
    else:
        guess = (float(y[0]) or 1.0, 1.0)

    def model(t, amplitude, rate):
        return amplitude * np.exp(-rate * t)

    (amplitude, rate), _ = curve_fit(model, x, y, p0=guess, maxfev=10000)
    residual = np.sum((y - model(x, amplitude, rate)) ** 2)
    total = np.sum((y - y.mean()) ** 2)
    r_squared = 1.0 - residual / total if total > 0 else 1.0
    return float(amplitude), float(rate), float(r_squared)
