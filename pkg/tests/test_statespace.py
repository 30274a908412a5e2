import math

import numpy as np
import pytest

from simulation.errors import SpaceMismatchError
from simulation.statespace import (
    ATOMS,
    AtomLevel,
    BasisState,
    DensityMatrix,
    HilbertSpace,
    StateVector,
    Subsystem,
    basis_index,
    basis_unindex,
    build_operators,
    partial_trace,
    purity,
    tensor_state,
)

G, E = AtomLevel.GROUND, AtomLevel.EXCITED


def test_dimension_and_ordering(space):
    assert space.dim == 16
    assert basis_index(BasisState(0, G, G), space) == 0
    assert basis_index(BasisState(0, G, E), space) == 1
    assert basis_index(BasisState(0, E, G), space) == 2
    assert basis_index(BasisState(1, G, G), space) == 4
    assert basis_index(BasisState(3, E, E), space) == 15


def test_index_round_trip(space):
    for index in range(space.dim):
        assert basis_index(basis_unindex(index, space), space) == index


def test_index_out_of_range(space):
    with pytest.raises(IndexError):
        basis_index(BasisState(4, G, G), space)
    with pytest.raises(IndexError):
        basis_unindex(16, space)


def test_parse_basis_state():
    b = BasisState.parse("2,e,g")
    assert b == BasisState(2, E, G)
    assert b.excitations == 3
    with pytest.raises(ValueError):
        BasisState.parse("2,x,g")


def test_sector_sizes(space):
    sizes = [len(space.sector_indices(k)) for k in range(6)]
    assert sizes == [1, 3, 4, 4, 3, 1]


def test_ladder_commutator_below_cutoff(ops, space):
    commutator = ops.a.commutator(ops.adag).entries
    # [a, a†] = 1 except on the truncated top level
    for index in range(4 * space.cutoff):
        assert abs(commutator[index, index] - 1.0) < 1e-12


def test_excitation_number_is_diagonal(ops, space):
    diagonal = np.real(np.diag(ops.n_exc.entries))
    np.testing.assert_allclose(diagonal, space.excitation_numbers())
    assert np.count_nonzero(ops.n_exc.entries - np.diag(np.diag(ops.n_exc.entries))) == 0


def test_sigma_z_sign_convention(ops, space):
    excited = StateVector.from_basis(BasisState(0, E, G), space)
    value = np.vdot(excited.amplitudes, ops.sigma_z[0].entries @ excited.amplitudes)
    assert abs(value - 1.0) < 1e-12
    lowered = ops.sigma_minus[0].entries @ excited.amplitudes
    assert abs(lowered[basis_index(BasisState(0, G, G), space)] - 1.0) < 1e-12


def test_operator_space_mismatch(ops):
    other = HilbertSpace(2)
    with pytest.raises(SpaceMismatchError):
        ops.a @ build_operators(other).a


def test_atom_swap(space):
    swap = space.atom_swap()
    assert np.allclose(swap.entries @ swap.entries, np.eye(space.dim))
    eg = StateVector.from_basis(BasisState(1, E, G), space).amplitudes
    ge = StateVector.from_basis(BasisState(1, G, E), space).amplitudes
    assert np.allclose(swap.entries @ eg, ge)


def test_product_state_marginals_are_pure(space):
    psi = tensor_state(0, [1, 1], [1, 0], space)
    for subsystem in (Subsystem.CAVITY, Subsystem.ATOM1, Subsystem.ATOM2):
        assert abs(purity(partial_trace(psi, [subsystem])) - 1.0) < 1e-12


def test_bell_pair_marginal_is_mixed(space):
    psi = StateVector.superposition(
        [(1.0, BasisState(0, G, E)), (1.0, BasisState(0, E, G))], space
    )
    rho1 = partial_trace(psi, [Subsystem.ATOM1])
    assert abs(purity(rho1) - 0.5) < 1e-12
    np.testing.assert_allclose(rho1.entries, 0.5 * np.eye(2), atol=1e-12)


def test_partial_trace_composes(space, rng):
    amplitudes = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    psi = StateVector(space, amplitudes / np.linalg.norm(amplitudes))
    atoms = partial_trace(psi, ATOMS)
    direct = partial_trace(psi, [Subsystem.ATOM1])
    nested = partial_trace(atoms, [Subsystem.ATOM1])
    np.testing.assert_allclose(nested.entries, direct.entries, atol=1e-12)
    assert abs(atoms.trace() - 1.0) < 1e-12


def test_partial_trace_rejects_bad_keep(space):
    psi = StateVector.from_basis(BasisState(0, G, G), space)
    with pytest.raises(ValueError):
        partial_trace(psi, [])
    with pytest.raises(ValueError):
        partial_trace(psi, [Subsystem.CAVITY, Subsystem.ATOM1, Subsystem.ATOM2])
    atoms = partial_trace(psi, ATOMS)
    with pytest.raises(ValueError):
        partial_trace(atoms, [Subsystem.CAVITY])


def test_density_validation_flags_negative_eigenvalue():
    entries = np.diag([1.2, -0.2, 0.0, 0.0])
    rho = DensityMatrix(None, entries, subsystems=ATOMS, dims=(2, 2))
    issues = rho.validate()
    assert any("negative eigenvalue" in issue for issue in issues)
    assert not rho.is_valid()


def test_superposition_is_normalized(space):
    psi = StateVector.superposition(
        [(1.0, BasisState(0, G, G)), (1j, BasisState(1, G, G)), (2.0, BasisState(0, E, E))], space
    )
    assert psi.is_normalized()
    assert abs(abs(psi.amplitudes[basis_index(BasisState(0, E, E), space)]) - 2 / math.sqrt(6)) < 1e-12
