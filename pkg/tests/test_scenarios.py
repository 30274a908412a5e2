import pytest

from experiments.scenarios import (
    PRESETS,
    Scenario,
    Variant,
    laboratory_rates,
    load_config,
    parse_config,
    preset,
)
from simulation.errors import ConfigError
from simulation.statespace import AtomLevel, BasisState


@pytest.mark.parametrize("name", PRESETS)
def test_presets_validate(name):
    scenario = preset(name)
    assert scenario.columns[0] == scenario.axis
    assert scenario.columns[-1] == "status"
    assert scenario.base.cutoff == 3


def test_fig2_grid():
    scenario = preset("fig2")
    assert len(scenario.values) == 241
    assert scenario.values[0] == 0.0
    assert scenario.values[-1] == pytest.approx(1.2)
    assert scenario.config_at(0.44).chirps.delta0 == pytest.approx(13.2)


def test_decay_comparison_columns():
    scenario = preset("fig3")
    assert "fidelity_decay" in scenario.columns
    assert "wootters" in scenario.columns
    gamma_c, gamma_s = scenario.decay_rates()
    assert gamma_c == pytest.approx(7.3e-4, rel=1e-2)
    assert gamma_s == pytest.approx(3.18e-3, rel=1e-2)
    decayed = scenario.config_at(0.44, scenario.variants()[1])
    assert decayed.has_decay and not scenario.config_at(0.44).has_decay


def test_rate_axis_feeds_each_channel():
    scenario = preset("fig5")
    assert scenario.columns[:3] == ["rate", "wootters_gamma_c", "fidelity_gamma_c"]
    cavity, atomic = scenario.variants()
    assert scenario.config_at(0.01, cavity).gamma_c == 0.01
    assert scenario.config_at(0.01, cavity).gamma_s == 0.0
    assert scenario.config_at(0.01, atomic).gamma_s == 0.01
    assert scenario.parameters["calibrate_resonance"] is True


def test_spatial_axis_moves_second_atom():
    scenario = preset("fig4")
    assert scenario.config_at(0.0).pulses.g2 == pytest.approx(30.0)
    assert abs(scenario.config_at(0.25).pulses.g2) < 1e-12
    assert scenario.config_at(0.5).pulses.g2 == pytest.approx(-30.0)


def test_laboratory_rates():
    rates = laboratory_rates()
    assert rates["g0"] == 30.0
    assert rates["sigma"] == pytest.approx(95.5e-6, rel=1e-2)


def test_parse_config(tiny_config_text):
    scenario = parse_config(tiny_config_text)
    assert scenario.name == "tiny"
    assert scenario.values == pytest.approx((0.0, 0.2, 0.4))
    assert scenario.observables == ("fidelity", "c3", "mean_photon")
    assert scenario.parameters["g0"] == 4.0
    assert scenario.parameters["tau0"] == 2.0
    assert scenario.base.pulses.g2 == pytest.approx(3.0)


def test_parse_config_on_top_of_preset():
    scenario = parse_config("scenario.preset = fig2\nsweep.values = 0.4, 0.44, 0.48\n")
    assert scenario.name == "fig2"
    assert scenario.values == (0.4, 0.44, 0.48)
    assert scenario.parameters["g0"] == 30.0


def test_parse_config_log_grid():
    scenario = parse_config(
        "scenario.observables = wootters\n"
        "sweep.axis = gamma_s\nsweep.start = 1e-4\nsweep.stop = 1e-2\nsweep.num = 3\nsweep.spacing = log\n"
    )
    assert scenario.values == pytest.approx((1e-4, 1e-3, 1e-2))


def test_parse_config_initial_state():
    scenario = parse_config("scenario.initial_state = 0,e,g\nsweep.values = 0.1\n")
    psi = scenario.initial(scenario.base.space)
    assert psi.amplitudes[2] == 1.0
    assert BasisState.parse(scenario.initial_state) == BasisState(0, AtomLevel.EXCITED, AtomLevel.GROUND)


@pytest.mark.parametrize(
    "text, line",
    [
        ("model.g0 = 4\nmodel.bogus = 1\n", 2),
        ("model.g0 = 4\nmodel.g0 = 5\n", 2),
        ("\nmodel.delta = fast\n", 2),
        ("model.g0\n", 1),
        ("this is not valid\n", 1),
        ("model.cutoff = 2.5\n", 1),
    ],
)
def test_parse_config_errors_carry_line(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


@pytest.mark.parametrize(
    "text",
    [
        "scenario.observables = fidelity, entropy\nsweep.values = 0.1\n",
        "sweep.axis = colour\nsweep.values = 0.1\n",
        "sweep.values = 0.1, 0.3, 0.2\n",
        "scenario.preset = fig9\n",
        "model.g0 = -3\nsweep.values = 0.1\n",
        "sweep.axis = rate\n",
    ],
)
def test_invalid_scenarios(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_rate_axis_excludes_decay_comparison():
    with pytest.raises(ConfigError):
        Scenario(
            name="bad",
            parameters={},
            axis="rate",
            values=(0.0, 0.01),
            observables=("wootters",),
            compare_decay=True,
        )


def test_load_config_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "absent.cfg")


def test_load_config(tiny_config_file):
    assert load_config(tiny_config_file).name == "tiny"


def test_scenario_dict_round_trip():
    scenario = preset("fig3")
    restored = Scenario.from_dict(scenario.to_dict())
    assert restored.columns == scenario.columns
    assert restored.values == scenario.values
    assert restored.base == scenario.base


def test_default_variant_uses_axis():
    scenario = preset("fig2")
    assert scenario.config_at(0.2, Variant()).chirps.delta0 == pytest.approx(6.0)
