"""
State Space Module
Truncated Fock ⊗ qubit ⊗ qubit Hilbert space, its basis ordering,
elementary operators, and reduced-state utilities.

Basis ordering is lexicographic in (n, s1, s2) with the atoms varying
fastest, so |n; s1, s2> sits at index 4n + 2*s1 + s2.
"""

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterable, Iterator, Optional, Union

import numpy as np

from .errors import SpaceMismatchError


HERMITIAN_TOL = 1e-12
DENSITY_HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-8
NORM_TOL = 1e-9


class AtomLevel(IntEnum):
    """Two-level atom state; the integer value is the qubit index."""
    GROUND = 0
    EXCITED = 1

    @classmethod
    def parse(cls, text: str) -> "AtomLevel":
        key = text.strip().lower()
        if key in ("g", "ground", "0"):
            return cls.GROUND
        if key in ("e", "excited", "1"):
            return cls.EXCITED
        raise ValueError(f"Unknown atom level: {text!r} (expected 'g' or 'e')")


class Subsystem(Enum):
    """Tensor factors of the system, in storage order."""
    CAVITY = 0
    ATOM1 = 1
    ATOM2 = 2


ALL_SUBSYSTEMS = (Subsystem.CAVITY, Subsystem.ATOM1, Subsystem.ATOM2)
ATOMS = (Subsystem.ATOM1, Subsystem.ATOM2)


@dataclass(frozen=True)
class BasisState:
    """Bare product state |n; s1, s2>."""
    n: int
    s1: AtomLevel
    s2: AtomLevel

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"Photon number must be nonnegative, got {self.n}")
        object.__setattr__(self, "s1", AtomLevel(self.s1))
        object.__setattr__(self, "s2", AtomLevel(self.s2))

    @property
    def excitations(self) -> int:
        return self.n + int(self.s1) + int(self.s2)

    @classmethod
    def parse(cls, text: str) -> "BasisState":
        """Parse 'n,s1,s2' such as '0,e,g'."""
        parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
        if len(parts) != 3:
            raise ValueError(f"Basis state must look like 'n,s1,s2', got {text!r}")
        return cls(int(parts[0]), AtomLevel.parse(parts[1]), AtomLevel.parse(parts[2]))

    def __str__(self) -> str:
        label = {AtomLevel.GROUND: "g", AtomLevel.EXCITED: "e"}
        return f"|{self.n};{label[self.s1]},{label[self.s2]}>"


@dataclass(frozen=True)
class HilbertSpace:
    """Mode Fock space truncated at `cutoff` photons, times two qubits."""
    cutoff: int

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError(f"Fock cutoff must be >= 0, got {self.cutoff}")

    @property
    def dim(self) -> int:
        return 4 * (self.cutoff + 1)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.cutoff + 1, 2, 2)

    def basis(self) -> Iterator[BasisState]:
        for index in range(self.dim):
            yield basis_unindex(index, self)

    def excitation_numbers(self) -> np.ndarray:
        return np.array([b.excitations for b in self.basis()])

    def sector_indices(self, excitations: int) -> np.ndarray:
        """Indices of the basis states with the given excitation number."""
        return np.flatnonzero(self.excitation_numbers() == excitations)

    def complete_sectors(self) -> list[int]:
        """Excitation numbers whose whole sector fits below the cutoff."""
        return list(range(0, self.cutoff + 1))

    def atom_swap(self) -> "Operator":
        """Permutation exchanging the two atoms' labels."""
        perm = np.zeros((self.dim, self.dim), dtype=complex)
        for b in self.basis():
            perm[basis_index(BasisState(b.n, b.s2, b.s1), self), basis_index(b, self)] = 1.0
        return Operator(self, perm)


def basis_index(b: BasisState, space: HilbertSpace) -> int:
    """Position of a bare state in the (n, s1, s2) ordering."""
    if b.n > space.cutoff:
        raise IndexError(f"Photon number {b.n} exceeds cutoff {space.cutoff}")
    return 4 * b.n + 2 * int(b.s1) + int(b.s2)


def basis_unindex(index: int, space: HilbertSpace) -> BasisState:
    """Inverse of basis_index."""
    if not 0 <= index < space.dim:
        raise IndexError(f"Index {index} out of range (0-{space.dim - 1})")
    n, rest = divmod(index, 4)
    return BasisState(n, AtomLevel(rest // 2), AtomLevel(rest % 2))


def _check_same_space(first: HilbertSpace, second: HilbertSpace):
    if first != second:
        raise SpaceMismatchError(f"Space mismatch: cutoff {first.cutoff} vs {second.cutoff}")


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex matrix on a truncated space."""
    space: HilbertSpace
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (self.space.dim, self.space.dim):
            raise SpaceMismatchError(
                f"Operator shape {entries.shape} does not match dim {self.space.dim}"
            )
        object.__setattr__(self, "entries", entries)

    def __matmul__(self, other: "Operator") -> "Operator":
        _check_same_space(self.space, other.space)
        return Operator(self.space, self.entries @ other.entries)

    def __add__(self, other: "Operator") -> "Operator":
        _check_same_space(self.space, other.space)
        return Operator(self.space, self.entries + other.entries)

    def __sub__(self, other: "Operator") -> "Operator":
        _check_same_space(self.space, other.space)
        return Operator(self.space, self.entries - other.entries)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.space, scalar * self.entries)

    __rmul__ = __mul__

    def dag(self) -> "Operator":
        return Operator(self.space, self.entries.conj().T)

    def commutator(self, other: "Operator") -> "Operator":
        return self @ other - other @ self

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        scale = max(1.0, self.norm())
        return float(np.linalg.norm(self.entries - self.entries.conj().T)) <= tol * scale

    def sector_block(self, excitations: int) -> np.ndarray:
        """Restriction to one excitation sector, in basis-index order."""
        idx = self.space.sector_indices(excitations)
        return self.entries[np.ix_(idx, idx)]


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state amplitudes in the (n, s1, s2) basis."""
    space: HilbertSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape != (self.space.dim,):
            raise SpaceMismatchError(
                f"State length {amplitudes.shape[0]} does not match dim {self.space.dim}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_basis(cls, b: BasisState, space: HilbertSpace) -> "StateVector":
        amplitudes = np.zeros(space.dim, dtype=complex)
        amplitudes[basis_index(b, space)] = 1.0
        return cls(space, amplitudes)

    @classmethod
    def superposition(cls, terms: Iterable[tuple[complex, BasisState]], space: HilbertSpace) -> "StateVector":
        """Normalized sum of weighted basis states."""
        amplitudes = np.zeros(space.dim, dtype=complex)
        for weight, b in terms:
            amplitudes[basis_index(b, space)] += weight
        norm = np.linalg.norm(amplitudes)
        if norm == 0:
            raise ValueError("Superposition has zero norm")
        return cls(space, amplitudes / norm)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol

    def overlap(self, other: "StateVector") -> complex:
        """<other|self>."""
        _check_same_space(self.space, other.space)
        return complex(np.vdot(other.amplitudes, self.amplitudes))

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Mixed state on the full space or on a subset of its tensor factors.

    `space` is kept for full-system states; reduced states produced by
    partial_trace carry the surviving `subsystems` instead.
    """
    space: Optional[HilbertSpace]
    entries: np.ndarray
    subsystems: tuple[Subsystem, ...] = ALL_SUBSYSTEMS
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        dims = self.dims
        if not dims:
            if self.space is None:
                raise ValueError("DensityMatrix needs either a space or explicit dims")
            full = dict(zip(ALL_SUBSYSTEMS, self.space.dims))
            dims = tuple(full[s] for s in self.subsystems)
        size = int(np.prod(dims))
        if entries.shape != (size, size):
            raise SpaceMismatchError(f"Density shape {entries.shape} does not match dims {dims}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "dims", tuple(dims))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def eigenvalues(self) -> np.ndarray:
        hermitian = 0.5 * (self.entries + self.entries.conj().T)
        return np.linalg.eigvalsh(hermitian)

    def validate(self) -> list[str]:
        """Return the violated invariants (empty when the state is valid)."""
        issues = []
        if np.linalg.norm(self.entries - self.entries.conj().T) > DENSITY_HERMITIAN_TOL:
            issues.append("not Hermitian")
        if abs(self.trace() - 1.0) > TRACE_TOL:
            issues.append(f"trace {self.trace():.12g} != 1")
        lowest = float(self.eigenvalues().min())
        if lowest < -POSITIVITY_TOL:
            issues.append(f"negative eigenvalue {lowest:.3g}")
        return issues

    def is_valid(self) -> bool:
        return not self.validate()


@dataclass(frozen=True, eq=False)
class OperatorSet:
    """Elementary operators of the two-atom, single-mode system."""
    space: HilbertSpace
    a: Operator
    adag: Operator
    sigma_plus: tuple[Operator, Operator]
    sigma_minus: tuple[Operator, Operator]
    sigma_z: tuple[Operator, Operator]
    number: Operator
    n_exc: Operator

    def identity(self) -> Operator:
        return Operator(self.space, np.eye(self.space.dim))


def build_operators(space: HilbertSpace) -> OperatorSet:
    """Ladder, Pauli and excitation-number operators on the truncated space."""
    fock = space.cutoff + 1
    destroy = np.diag(np.sqrt(np.arange(1, fock)), k=1)
    eye_f = np.eye(fock)
    eye_q = np.eye(2)
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])  # |g><e|
    pauli_z = np.diag([-1.0, 1.0])

    def embed(cavity, atom1, atom2) -> Operator:
        return Operator(space, np.kron(np.kron(cavity, atom1), atom2))

    a = embed(destroy, eye_q, eye_q)
    sm1 = embed(eye_f, lower, eye_q)
    sm2 = embed(eye_f, eye_q, lower)
    sz1 = embed(eye_f, pauli_z, eye_q)
    sz2 = embed(eye_f, eye_q, pauli_z)
    adag = a.dag()
    number = adag @ a
    n_exc = number + sm1.dag() @ sm1 + sm2.dag() @ sm2
    return OperatorSet(
        space=space,
        a=a,
        adag=adag,
        sigma_plus=(sm1.dag(), sm2.dag()),
        sigma_minus=(sm1, sm2),
        sigma_z=(sz1, sz2),
        number=number,
        n_exc=n_exc,
    )


def tensor_state(photon: int, atom1: np.ndarray, atom2: np.ndarray, space: HilbertSpace) -> StateVector:
    """Product state |photon> ⊗ atom1 ⊗ atom2 from single-qubit amplitude pairs."""
    if photon > space.cutoff:
        raise IndexError(f"Photon number {photon} exceeds cutoff {space.cutoff}")
    cavity = np.zeros(space.cutoff + 1, dtype=complex)
    cavity[photon] = 1.0
    amplitudes = np.kron(np.kron(cavity, np.asarray(atom1, dtype=complex)), np.asarray(atom2, dtype=complex))
    return StateVector(space, amplitudes / np.linalg.norm(amplitudes))


def partial_trace(
    state: Union[StateVector, DensityMatrix],
    keep: Iterable[Subsystem],
) -> DensityMatrix:
    """Reduced density matrix on the kept subsystems (in storage order)."""
    rho = state.to_density() if isinstance(state, StateVector) else state
    present = rho.subsystems
    wanted = set(keep)
    if not wanted:
        raise ValueError("keep must name at least one subsystem")
    unknown = wanted - set(present)
    if unknown:
        raise ValueError(f"Cannot keep {sorted(s.name for s in unknown)}: not present in state")
    if wanted == set(present):
        raise ValueError("keep must be a proper subset of the state's subsystems")

    kept = tuple(s for s in present if s in wanted)
    count = len(present)
    rows = "abcdef"[:count]
    cols = "ghijkl"[:count]
    cols = "".join(rows[i] if present[i] not in wanted else cols[i] for i in range(count))
    out_rows = "".join(rows[i] for i in range(count) if present[i] in wanted)
    out_cols = "".join(cols[i] for i in range(count) if present[i] in wanted)
    tensor = rho.entries.reshape(rho.dims + rho.dims)
    reduced = np.einsum(f"{rows}{cols}->{out_rows}{out_cols}", tensor)
    kept_dims = tuple(d for s, d in zip(present, rho.dims) if s in wanted)
    size = int(np.prod(kept_dims))
    return DensityMatrix(None, reduced.reshape(size, size), subsystems=kept, dims=kept_dims)


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2)."""
    return float(np.real(np.einsum("ij,ji->", rho.entries, rho.entries)))
