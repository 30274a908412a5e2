import dataclasses
import math

import numpy as np
import pytest

from simulation import dynamics
from simulation.adiabatic import simulated_fidelity
from simulation.dynamics import (
    evolve,
    evolve_density,
    evolve_state,
    extract_propagator,
    sector_leakage,
    sector_weights,
)
from simulation.errors import DomainError, IntegrationError
from simulation.metrics import input_state, mean_photon
from simulation.model import ChirpParams, ModelConfig, PulseParams
from simulation.statespace import AtomLevel, BasisState, DensityMatrix, StateVector

G, E = AtomLevel.GROUND, AtomLevel.EXCITED


def test_quiet_window_is_identity(quiet_config, space):
    psi0 = input_state(space)
    final = evolve_state(psi0, quiet_config, samples=5).final
    np.testing.assert_allclose(final.amplitudes, psi0.amplitudes, atol=1e-12)


def test_norm_is_conserved(weak_config, space):
    trajectory = evolve_state(input_state(space), weak_config)
    for state in trajectory.states:
        assert abs(state.norm() - 1.0) < 1e-8
    assert trajectory.rhs_evaluations > 0


def test_single_atom_rabi_area(space):
    # Atom 2 uncoupled: |0;e,g> <-> |1;g,g> with pulse area J·g1·√π
    g1 = 0.3
    config = ModelConfig(PulseParams(g1, 0.0, 1.25), ChirpParams(0.0))
    psi0 = StateVector.from_basis(BasisState(0, E, G), space)
    final = evolve_state(psi0, config).final
    area = 2 * g1 * math.sqrt(math.pi)
    population = abs(final.amplitudes[2]) ** 2
    assert abs(population - math.cos(area) ** 2) < 1e-6
    assert abs(final.amplitudes[1]) < 1e-12


def test_sectors_do_not_mix(weak_config, space):
    trajectory = evolve_state(StateVector.from_basis(BasisState(0, E, G), space), weak_config)
    assert sector_leakage(trajectory) < 1e-10
    weights = sector_weights(evolve_state(input_state(space), weak_config).final)
    assert weights[0] == pytest.approx(0.25, abs=1e-8)
    assert weights[1] == pytest.approx(0.5, abs=1e-8)
    assert weights[2] == pytest.approx(0.25, abs=1e-8)


def test_density_matches_pure_evolution(weak_config, space):
    psi0 = input_state(space)
    pure = evolve_state(psi0, weak_config, samples=9)
    mixed = evolve_density(psi0, weak_config, samples=9)
    for psi, rho in zip(pure.states, mixed.states):
        np.testing.assert_allclose(rho.entries, psi.to_density().entries, atol=1e-7)


def test_cavity_decay_without_coupling(quiet_config, space):
    gamma = 0.3
    config = quiet_config.with_decay(gamma_c=gamma)
    rho0 = StateVector.from_basis(BasisState(1, G, G), space)
    trajectory = evolve_density(rho0, config, samples=11)
    start = config.window[0]
    for tau, rho in zip(trajectory.times, trajectory.states):
        expected = math.exp(-2 * gamma * (tau - start))
        assert abs(mean_photon(rho) - expected) < 1e-6


def test_decay_never_adds_excitations(weak_config, space, ops):
    config = weak_config.with_decay(gamma_c=0.05, gamma_s=0.02)
    trajectory = evolve_density(input_state(space), config, samples=41)
    n_exc = ops.n_exc.entries
    values = [float(np.real(np.trace(n_exc @ rho.entries))) for rho in trajectory.states]
    assert all(later <= earlier + 1e-8 for earlier, later in zip(values, values[1:]))
    for rho in trajectory.states:
        assert rho.validate() == []


def test_evolve_dispatch(weak_config, space):
    psi0 = input_state(space)
    assert not evolve(psi0, weak_config, samples=2).is_mixed
    assert evolve(psi0, weak_config.with_decay(gamma_s=1e-3), samples=2).is_mixed


def test_pure_path_rejects_decay_and_bad_norm(weak_config, space):
    psi0 = input_state(space)
    with pytest.raises(DomainError):
        evolve_state(psi0, weak_config.with_decay(gamma_c=1e-3))
    with pytest.raises(DomainError):
        evolve_state(StateVector(space, 2 * psi0.amplitudes), weak_config)


def test_invalid_density_rejected(weak_config, space):
    entries = np.zeros((space.dim, space.dim))
    entries[0, 0] = 2.0
    with pytest.raises(DomainError):
        evolve_density(DensityMatrix(space, entries), weak_config)


def test_budget_exhaustion(weak_config, space, monkeypatch):
    monkeypatch.setattr(dynamics, "MAX_RHS_EVALUATIONS", 50)
    with pytest.raises(IntegrationError) as info:
        evolve_state(input_state(space), weak_config)
    start, end = weak_config.window
    assert start <= info.value.last_tau <= end


def test_halving_tolerance_moves_fidelity_less_than_tolerance(weak_config):
    coarse = simulated_fidelity(weak_config)
    fine = simulated_fidelity(dataclasses.replace(weak_config, tol=weak_config.tol / 2))
    assert abs(coarse - fine) <= weak_config.tol


def test_vacuum_sector_propagator(weak_config):
    propagator = extract_propagator(weak_config, 0)
    assert propagator.entries.shape == (1, 1)
    assert abs(propagator.entries[0, 0] - 1.0) < 1e-7


def test_propagators_are_unitary(weak_config):
    for sector in (1, 2):
        assert extract_propagator(weak_config, sector).unitarity_error() < 1e-6


def test_empty_sector(weak_config):
    with pytest.raises(DomainError):
        extract_propagator(weak_config, 9)


@pytest.mark.slow
def test_chirped_passage_transfers_excitation(fig2_config):
    propagator = extract_propagator(fig2_config.with_chirp(0.44 * 30.0), 1)
    transfer = propagator.element(BasisState(0, E, G), BasisState(0, G, E))
    assert abs(transfer) > 0.99
