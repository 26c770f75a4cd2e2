"""Exception types raised by the simulator.

Scripts catch SimulationError and print a one-line ``error: <kind>: <message>``.
"""


class SimulationError(Exception):
    """Base class for every error the library raises on purpose."""

    kind = "simulation"


class ConfigurationError(SimulationError, ValueError):
    kind = "invalid-configuration"


class NormalizationError(SimulationError, ValueError):
    kind = "normalization-violation"


class DimensionError(SimulationError, ValueError):
    kind = "dimension-mismatch"


class NoFeedbackError(SimulationError):
    kind = "no-feedback"


class ComplexityError(SimulationError):
    kind = "complexity"


class OutputDirError(SimulationError):
    kind = "output-dir"


def error_line(exc: BaseException) -> str:
    """Single-line, machine-readable description of exc."""
    kind = getattr(exc, "kind", type(exc).__name__)
    message = " ".join(str(exc).split())
    return f"error: {kind}: {message}"
