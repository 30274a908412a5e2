"""
Scenario Module

Sweep scenarios: parameter sets, figure presets, and the key-value
experiment config format (`model.delta0_over_g0 = 0.44`).
"""

import io
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np
from dotenv.parser import parse_stream

from config import (
    ATOM_LIFETIME_MS,
    CAVITY_FREQUENCY_GHZ,
    CAVITY_Q,
    COUPLING_KHZ,
    DEFAULT_CUTOFF,
    G0_SIGMA_FIG2,
    PURE_TOLERANCE,
)
from simulation.errors import ConfigError, DomainError
from simulation.metrics import input_state
from simulation.model import (
    ChirpParams,
    ModelConfig,
    PulseParams,
    SpatialConfig,
    rates_from_physical,
    spatial_amplitudes,
)
from simulation.statespace import BasisState, HilbertSpace, StateVector


OBSERVABLES = (
    "fidelity",
    "c3",
    "wootters",
    "mean_photon",
    "factorization_residual",
    "purity_atoms",
)

FIG5_G0 = 18.9286


def laboratory_rates() -> dict:
    """Dimensionless decay rates of the circular-Rydberg setup at the chirped-preset coupling."""
    return rates_from_physical(
        g0_hz=COUPLING_KHZ * 1e3,
        lifetime_s=ATOM_LIFETIME_MS * 1e-3,
        quality=CAVITY_Q,
        mode_hz=CAVITY_FREQUENCY_GHZ * 1e9,
        g0_sigma=G0_SIGMA_FIG2,
    )


DEFAULT_PARAMETERS = {
    "g0": G0_SIGMA_FIG2,
    "g2_over_g0": 1.0,
    "delta": 1.25,
    "delta0_over_g0": 0.0,
    "tau0": 2.0,
    "sigma_s": 0.2,
    "cutoff": DEFAULT_CUTOFF,
    "gamma_c": 0.0,
    "gamma_s": 0.0,
    "window": None,
    "tol": PURE_TOLERANCE,
    "calibrate_resonance": False,
    "z1_over_lambda": 0.0,
    "z2_over_lambda": 0.0,
    "y1_over_w0": 0.0,
    "y2_over_w0": 0.0,
    "decay_gamma_c": None,  # None = laboratory rates
    "decay_gamma_s": None,
}

# Parameters that may be swept; "rate" feeds gamma_c and gamma_s in turn
AXES = (
    "delta0_over_g0",
    "g0",
    "g2_over_g0",
    "delta",
    "tau0",
    "sigma_s",
    "z1_over_lambda",
    "z2_over_lambda",
    "y1_over_w0",
    "y2_over_w0",
    "gamma_c",
    "gamma_s",
    "rate",
)


@dataclass(frozen=True)
class Variant:
    """One family of output columns evaluated at every grid point."""
    suffix: str = ""
    overrides: tuple[tuple[str, float], ...] = ()
    axis_param: Optional[str] = None


def build_config(params: dict) -> ModelConfig:
    """ModelConfig from flat scenario parameters."""
    g0 = float(params["g0"])
    g1, g2 = spatial_amplitudes(SpatialConfig(
        g0=g0,
        z1=params["z1_over_lambda"],
        z2=params["z2_over_lambda"],
        y1=params["y1_over_w0"],
        y2=params["y2_over_w0"],
    ))
    window = params.get("window")
    return ModelConfig(
        pulses=PulseParams(g1, g2 * params["g2_over_g0"], params["delta"]),
        chirps=ChirpParams(params["delta0_over_g0"] * g0, params["tau0"], params["sigma_s"]),
        cutoff=int(params["cutoff"]),
        gamma_c=params["gamma_c"],
        gamma_s=params["gamma_s"],
        window=tuple(window) if window is not None else None,
        tol=params["tol"],
    )


@dataclass(frozen=True, eq=False)
class Scenario:
    """A parameter sweep: base parameters, one axis, and the observables to record."""
    name: str
    parameters: dict
    axis: str
    values: tuple[float, ...]
    observables: tuple[str, ...]
    initial_state: str = "eq12"
    compare_decay: bool = False
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "observables", tuple(self.observables))
        object.__setattr__(self, "parameters", {**DEFAULT_PARAMETERS, **self.parameters})
        self.validate()

    def validate(self):
        if self.axis not in AXES:
            raise ConfigError(f"unknown axis {self.axis!r} (choose from {', '.join(AXES)})", field="sweep.axis")
        if not self.values:
            raise ConfigError("sweep grid is empty", field="sweep.values")
        steps = np.diff(self.values)
        if len(steps) and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ConfigError("sweep grid must be strictly monotone", field="sweep.values")
        if not self.observables:
            raise ConfigError("at least one observable is required", field="scenario.observables")
        unknown = [o for o in self.observables if o not in OBSERVABLES]
        if unknown:
            raise ConfigError(
                f"unknown observables {unknown} (choose from {', '.join(OBSERVABLES)})",
                field="scenario.observables",
            )
        if self.axis == "rate" and self.compare_decay:
            raise ConfigError("compare_decay cannot be combined with the rate axis", field="scenario.compare_decay")
        try:
            self.initial(HilbertSpace(int(self.parameters["cutoff"])))
            build_config(self.parameters)
        except (ValueError, IndexError) as e:
            raise ConfigError(str(e)) from e

    @property
    def base(self) -> ModelConfig:
        return build_config(self.parameters)

    def decay_rates(self) -> tuple[float, float]:
        """(γσ, Γσ) used by the decay comparison columns."""
        lab = laboratory_rates()
        gamma_c = self.parameters["decay_gamma_c"]
        gamma_s = self.parameters["decay_gamma_s"]
        return (
            lab["gamma_c"] if gamma_c is None else gamma_c,
            lab["gamma_s"] if gamma_s is None else gamma_s,
        )

    def variants(self) -> list[Variant]:
        if self.axis == "rate":
            return [Variant("_gamma_c", axis_param="gamma_c"), Variant("_gamma_s", axis_param="gamma_s")]
        if self.compare_decay:
            gamma_c, gamma_s = self.decay_rates()
            return [Variant(), Variant("_decay", overrides=(("gamma_c", gamma_c), ("gamma_s", gamma_s)))]
        return [Variant()]

    @property
    def columns(self) -> list[str]:
        names = [self.axis]
        for variant in self.variants():
            names.extend(f"{o}{variant.suffix}" for o in self.observables)
        names.append("status")
        return names

    def config_at(self, value: float, variant: Optional[Variant] = None) -> ModelConfig:
        variant = variant or Variant()
        params = dict(self.parameters)
        params.update(dict(variant.overrides))
        params[variant.axis_param or self.axis] = value
        return build_config(params)

    def initial(self, space: HilbertSpace) -> StateVector:
        if self.initial_state == "eq12":
            return input_state(space)
        return StateVector.from_basis(BasisState.parse(self.initial_state), space)

    def with_parameters(self, **updates) -> "Scenario":
        return replace(self, parameters={**self.parameters, **updates})

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "parameters": {k: list(v) if isinstance(v, tuple) else v for k, v in self.parameters.items()},
            "axis": self.axis,
            "values": list(self.values),
            "observables": list(self.observables),
            "initial_state": self.initial_state,
            "compare_decay": self.compare_decay,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        return cls(
            name=data["name"],
            parameters=dict(data["parameters"]),
            axis=data["axis"],
            values=tuple(data["values"]),
            observables=tuple(data["observables"]),
            initial_state=data.get("initial_state", "eq12"),
            compare_decay=bool(data.get("compare_decay", False)),
        )


def _grid(start: float, stop: float, num: Optional[int] = None, step: Optional[float] = None, spacing: str = "linear") -> tuple[float, ...]:
    if spacing == "log":
        if num is None or start <= 0 or stop <= 0:
            raise ConfigError("log spacing needs positive start/stop and sweep.num", field="sweep.spacing")
        return tuple(np.geomspace(start, stop, int(num)))
    if spacing != "linear":
        raise ConfigError(f"unknown spacing {spacing!r} (linear or log)", field="sweep.spacing")
    if num is None:
        if step is None or step <= 0:
            raise ConfigError("linear sweep needs sweep.num or a positive sweep.step", field="sweep.step")
        num = int(round((stop - start) / step)) + 1
    return tuple(np.linspace(start, stop, int(num)))


# =============================================================================
# Presets
# =============================================================================

def preset(name: str) -> Scenario:
    """Figure presets: chirp sweep, robustness with decay, spatial landscape, decay landscape."""
    if name == "fig2":
        return Scenario(
            name="fig2",
            parameters={"g0": G0_SIGMA_FIG2, "delta": 1.25, "tau0": 2.0, "sigma_s": 0.2},
            axis="delta0_over_g0",
            values=_grid(0.0, 1.2, step=0.005),
            observables=("fidelity", "c3"),
            description="Gate fidelity against chirp amplitude",
        )
    if name == "fig3":
        return Scenario(
            name="fig3",
            parameters={"g0": G0_SIGMA_FIG2, "delta": 1.25, "tau0": 2.0, "sigma_s": 0.2},
            axis="delta0_over_g0",
            values=tuple(0.44 * r for r in np.linspace(0.8, 1.2, 41)),
            observables=("fidelity", "wootters", "mean_photon", "factorization_residual"),
            compare_decay=True,
            description="Fidelity around the optimum chirp with and without laboratory decay",
        )
    if name == "fig4":
        return Scenario(
            name="fig4",
            parameters={"g0": G0_SIGMA_FIG2, "delta": 1.25, "tau0": 2.0, "sigma_s": 0.2, "delta0_over_g0": 0.44},
            axis="z2_over_lambda",
            values=_grid(0.0, 1.0, step=0.005),
            observables=("c3", "fidelity", "mean_photon"),
            description="Tripartite concurrence against axial atom separation",
        )
    if name in ("fig5", "fig5-gamma", "fig5-spontaneous"):
        axis = {"fig5": "rate", "fig5-gamma": "gamma_c", "fig5-spontaneous": "gamma_s"}[name]
        return Scenario(
            name=name,
            parameters={"g0": FIG5_G0, "delta": 1.25, "delta0_over_g0": 0.0, "calibrate_resonance": True},
            axis=axis,
            values=_grid(0.0, 0.02, num=11),
            observables=("wootters", "fidelity", "mean_photon", "factorization_residual"),
            description="Atom-pair concurrence against cavity and atomic decay",
        )
    raise ConfigError(f"unknown preset {name!r} (choose from {', '.join(PRESETS)})", field="scenario.preset")


PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig5-gamma", "fig5-spontaneous")


# =============================================================================
# Config files
# =============================================================================

_MODEL_KEYS = {
    "model.g0": "g0",
    "model.g2_over_g0": "g2_over_g0",
    "model.delta": "delta",
    "model.delta0_over_g0": "delta0_over_g0",
    "model.tau0": "tau0",
    "model.sigma_s": "sigma_s",
    "model.cutoff": "cutoff",
    "model.gamma_c": "gamma_c",
    "model.gamma_s": "gamma_s",
    "model.window": "window",
    "model.tol": "tol",
    "model.calibrate_resonance": "calibrate_resonance",
    "spatial.z1_over_lambda": "z1_over_lambda",
    "spatial.z2_over_lambda": "z2_over_lambda",
    "spatial.y1_over_w0": "y1_over_w0",
    "spatial.y2_over_w0": "y2_over_w0",
    "decay.gamma_c": "decay_gamma_c",
    "decay.gamma_s": "decay_gamma_s",
}

_SCENARIO_KEYS = {
    "scenario.preset",
    "scenario.name",
    "scenario.initial_state",
    "scenario.observables",
    "scenario.compare_decay",
}

_SWEEP_KEYS = {
    "sweep.axis",
    "sweep.values",
    "sweep.start",
    "sweep.stop",
    "sweep.num",
    "sweep.step",
    "sweep.spacing",
}


def _parse_bool(text: str, line: int, key: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected true/false, got {text!r}", line=line, field=key)


def _parse_float(text: str, line: int, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", line=line, field=key) from None


def _parse_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _line_of(binding) -> int:
    """Line of the binding itself; leading blank lines are folded into it by the parser."""
    raw = binding.original.string
    return binding.original.line + raw[: len(raw) - len(raw.lstrip())].count("\n")


def parse_config(text: str) -> Scenario:
    """Build a Scenario from key-value config text."""
    entries: dict[str, tuple[str, int]] = {}
    for binding in parse_stream(io.StringIO(text)):
        line = _line_of(binding)
        if binding.error:
            raise ConfigError(f"cannot parse {binding.original.string.strip()!r}", line=line)
        if binding.key is None:
            continue
        key = binding.key.strip()
        if key not in _MODEL_KEYS and key not in _SCENARIO_KEYS and key not in _SWEEP_KEYS:
            raise ConfigError(f"unknown key {key!r}", line=line)
        if binding.value is None or binding.value.strip() == "":
            raise ConfigError("missing value", line=line, field=key)
        if key in entries:
            raise ConfigError(f"duplicate key (first set on line {entries[key][1]})", line=line, field=key)
        entries[key] = (binding.value.strip(), line)

    def get(key: str) -> Optional[tuple[str, int]]:
        return entries.get(key)

    if get("scenario.preset"):
        value, line = get("scenario.preset")
        try:
            scenario = preset(value)
        except ConfigError as e:
            raise ConfigError(str(e), line=line) from None
    else:
        scenario = None

    params = dict(scenario.parameters) if scenario else dict(DEFAULT_PARAMETERS)
    for key, name in _MODEL_KEYS.items():
        if key not in entries:
            continue
        value, line = entries[key]
        if name == "calibrate_resonance":
            params[name] = _parse_bool(value, line, key)
        elif name == "cutoff":
            number = _parse_float(value, line, key)
            if number != int(number) or number < 0:
                raise ConfigError(f"cutoff must be a nonnegative integer, got {value!r}", line=line, field=key)
            params[name] = int(number)
        elif name == "window":
            parts = _parse_list(value)
            if len(parts) != 2:
                raise ConfigError("window needs two comma-separated numbers", line=line, field=key)
            params[name] = tuple(_parse_float(p, line, key) for p in parts)
        else:
            params[name] = _parse_float(value, line, key)

    axis = scenario.axis if scenario else "delta0_over_g0"
    if get("sweep.axis"):
        axis = get("sweep.axis")[0]

    values = scenario.values if scenario else None
    if get("sweep.values"):
        value, line = get("sweep.values")
        values = tuple(_parse_float(p, line, "sweep.values") for p in _parse_list(value))
    elif get("sweep.start") or get("sweep.stop"):
        if not (get("sweep.start") and get("sweep.stop")):
            raise ConfigError("sweep.start and sweep.stop must be given together", field="sweep")
        start = _parse_float(*get("sweep.start"), "sweep.start")
        stop = _parse_float(*get("sweep.stop"), "sweep.stop")
        num = int(_parse_float(*get("sweep.num"), "sweep.num")) if get("sweep.num") else None
        step = _parse_float(*get("sweep.step"), "sweep.step") if get("sweep.step") else None
        spacing = get("sweep.spacing")[0] if get("sweep.spacing") else "linear"
        values = _grid(start, stop, num=num, step=step, spacing=spacing)
    if values is None:
        # single point at the base value of the axis
        base = params.get(axis)
        if axis == "rate" or base is None:
            raise ConfigError("no sweep grid given", field="sweep.values")
        values = (float(base),)

    observables = scenario.observables if scenario else ("fidelity",)
    if get("scenario.observables"):
        observables = tuple(_parse_list(get("scenario.observables")[0]))

    compare_decay = scenario.compare_decay if scenario else False
    if get("scenario.compare_decay"):
        compare_decay = _parse_bool(*get("scenario.compare_decay"), "scenario.compare_decay")

    name = get("scenario.name")[0] if get("scenario.name") else (scenario.name if scenario else "custom")
    initial_state = get("scenario.initial_state")[0] if get("scenario.initial_state") else (
        scenario.initial_state if scenario else "eq12"
    )

    try:
        return Scenario(
            name=name,
            parameters=params,
            axis=axis,
            values=values,
            observables=observables,
            initial_state=initial_state,
            compare_decay=compare_decay,
        )
    except DomainError as e:
        raise ConfigError(str(e)) from e


def load_config(path: str | Path) -> Scenario:
    """
    Load and validate an experiment config file.

    Args:
        path: Path to a `key = value` file with dotted keys

    Returns:
        Fully validated Scenario
    """
    return parse_config(Path(path).read_text(encoding="utf-8"))
