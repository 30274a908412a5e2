import math

import numpy as np
import pytest

from simulation.errors import DomainError
from simulation.metrics import (
    TwoQubitDensity,
    cavity_purity,
    concurrence_c3,
    input_state,
    target_state,
    exponential_fit,
    factorization_residual,
    fidelity,
    mean_photon,
    pure_concurrence,
    purity_atoms,
    two_qubit_state,
    wootters_concurrence,
)
from simulation.statespace import AtomLevel, BasisState, StateVector

G, E = AtomLevel.GROUND, AtomLevel.EXCITED
PHI_PLUS = np.array([1, 0, 0, 1]) / math.sqrt(2)


def random_unitary(rng, size):
    q, r = np.linalg.qr(rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_reference_states(space):
    assert input_state(space).is_normalized()
    assert target_state(space).is_normalized()
    assert fidelity(input_state(space), target_state(space)) == pytest.approx(0.5)
    assert fidelity(target_state(space), target_state(space)) == pytest.approx(1.0)


def test_mixed_fidelity_matches_pure(space):
    psi = input_state(space)
    target = target_state(space)
    assert fidelity(psi.to_density(), target) == pytest.approx(fidelity(psi, target), abs=1e-12)


def test_c3_values(space):
    assert concurrence_c3(input_state(space)) < 1e-7
    assert concurrence_c3(target_state(space)) == pytest.approx(1.0, abs=1e-12)
    ghz = StateVector.superposition([(1.0, BasisState(0, G, G)), (1.0, BasisState(1, E, E))], space)
    assert concurrence_c3(ghz) == pytest.approx(math.sqrt(1.5), abs=1e-12)


def test_pure_concurrence():
    assert pure_concurrence(PHI_PLUS) == pytest.approx(1.0)
    assert pure_concurrence(np.array([1, 0, 0, 0])) == 0.0
    assert pure_concurrence(np.array([0.5, 0.5, -0.5, 0.5])) == pytest.approx(1.0)


def test_wootters_agrees_with_pure_formula(rng):
    for _ in range(20):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        rho = TwoQubitDensity.from_pure(psi)
        assert abs(wootters_concurrence(rho) - pure_concurrence(psi)) < 1e-8


def test_wootters_werner_states():
    bell = np.outer(PHI_PLUS, PHI_PLUS)
    for p in np.linspace(0, 1, 11):
        rho = TwoQubitDensity(p * bell + (1 - p) * np.eye(4) / 4)
        expected = max(0.0, (3 * p - 1) / 2)
        assert abs(wootters_concurrence(rho) - expected) < 1e-8


def test_wootters_local_unitary_invariance(rng):
    bell = np.outer(PHI_PLUS, PHI_PLUS)
    rho = 0.8 * bell + 0.2 * np.eye(4) / 4
    before = wootters_concurrence(TwoQubitDensity(rho))
    for _ in range(5):
        u = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
        after = wootters_concurrence(TwoQubitDensity(u @ rho @ u.conj().T))
        assert abs(after - before) < 1e-8


def test_wootters_rejects_invalid_state():
    with pytest.raises(DomainError):
        wootters_concurrence(TwoQubitDensity(np.diag([1.1, -0.1, 0.0, 0.0])))


def test_atom_pair_of_target_is_maximally_entangled(space):
    pair = two_qubit_state(target_state(space))
    assert wootters_concurrence(pair) == pytest.approx(1.0, abs=1e-10)
    assert purity_atoms(target_state(space)) == pytest.approx(1.0)
    assert cavity_purity(target_state(space)) == pytest.approx(1.0)


def test_mean_photon(space):
    assert mean_photon(StateVector.from_basis(BasisState(2, G, G), space)) == pytest.approx(2.0)
    half = StateVector.superposition([(1.0, BasisState(0, G, G)), (1.0, BasisState(1, G, G))], space)
    assert mean_photon(half) == pytest.approx(0.5)
    assert mean_photon(half.to_density()) == pytest.approx(0.5)


def test_factorization_residual(space):
    assert factorization_residual(target_state(space)) < 1e-12
    one_photon = StateVector.from_basis(BasisState(1, G, G), space)
    assert factorization_residual(one_photon) == pytest.approx(math.sqrt(2))


def test_exponential_fit_recovers_parameters():
    x = np.linspace(0, 0.02, 11)
    y = 0.98 * np.exp(-7.5 * x)
    amplitude, rate, r_squared = exponential_fit(x, y)
    assert amplitude == pytest.approx(0.98, rel=1e-6)
    assert rate == pytest.approx(7.5, rel=1e-5)
    assert r_squared > 0.9999


def test_exponential_fit_needs_samples():
    with pytest.raises(ValueError):
        exponential_fit([0.0, 1.0], [1.0, 0.5])
