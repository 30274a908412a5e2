"""
Simulation Errors
Exception hierarchy shared by the simulation and experiment packages.
"""

from typing import Optional


class SimulationError(Exception):
    """Base class for every error raised by the simulator."""


class DomainError(SimulationError, ValueError):
    """A physical argument lies outside its valid domain."""


class SpaceMismatchError(SimulationError, ValueError):
    """Operands were built on different truncated Hilbert spaces."""


class IntegrationError(SimulationError, RuntimeError):
    """The adaptive integrator could not reach the end of the window."""

    def __init__(self, message: str, last_tau: float):
        super().__init__(f"{message} (last good tau = {last_tau:.6g})")
        self.last_tau = last_tau


class SpectrumTrackingError(SimulationError, RuntimeError):
    """Eigenvector matching became ambiguous away from a flagged crossing."""

    def __init__(self, message: str, tau: float):
        super().__init__(f"{message} at tau = {tau:.6g}")
        self.tau = tau


class QuadratureError(SimulationError, RuntimeError):
    """Adaptive quadrature did not converge."""


class ChirpSolveError(SimulationError, RuntimeError):
    """No chirp amplitude in the search bracket closes the target phase."""

    def __init__(self, message: str, attainable: tuple[float, float]):
        low, high = attainable
        super().__init__(f"{message}; attainable phase range [{low:.6g}, {high:.6g}] rad")
        self.attainable = attainable


class ConfigError(SimulationError, ValueError):
    """An experiment configuration could not be parsed or validated."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if field is not None:
            prefix += f"{field}: "
        super().__init__(prefix + message)
        self.line = line
        self.field = field
