import numpy as np
import pytest

from experiments.scenarios import parse_config
from simulation.model import ChirpParams, ModelConfig, PulseParams
from simulation.statespace import HilbertSpace, build_operators


@pytest.fixture
def space():
    return HilbertSpace(3)


@pytest.fixture
def ops(space):
    return build_operators(space)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def fig2_config():
    """g0σ = 30, δ = 1.25, τ0 = 2, σ_s = 0.2, no chirp yet."""
    return ModelConfig(
        pulses=PulseParams(30.0, 30.0, 1.25),
        chirps=ChirpParams(0.0, 2.0, 0.2),
        cutoff=3,
    )


@pytest.fixture
def weak_config():
    """Weak coupling with a mild chirp: cheap to integrate, still nontrivial."""
    return ModelConfig(
        pulses=PulseParams(4.0, 3.0, 1.0),
        chirps=ChirpParams(1.5, 2.0, 0.3),
        cutoff=3,
    )


@pytest.fixture
def quiet_config():
    """Window far past both pulses and chirps: H(τ) vanishes to machine precision."""
    return ModelConfig(
        pulses=PulseParams(30.0, 30.0, 1.25),
        chirps=ChirpParams(10.0, 2.0, 0.2),
        cutoff=3,
        window=(20.0, 25.0),
    )


TINY_CONFIG = """\
# weak-coupling chirp sweep
scenario.name = tiny
scenario.observables = fidelity, c3, mean_photon
model.g0 = 4
model.g2_over_g0 = 0.75
model.delta = 1.0
model.sigma_s = 0.3
sweep.axis = delta0_over_g0
sweep.start = 0
sweep.stop = 0.4
sweep.num = 3
"""


@pytest.fixture
def tiny_config_text():
    return TINY_CONFIG


@pytest.fixture
def tiny_config_file(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY_CONFIG, encoding="utf-8")
    return path


@pytest.fixture
def tiny_scenario():
    return parse_config(TINY_CONFIG)
