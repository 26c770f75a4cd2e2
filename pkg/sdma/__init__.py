"""Limited-feedback SDMA downlink simulator with robust index assignment."""

__version__ = "0.1.0"

from sdma.config import ExperimentSpec, SimConfig, load_spec
from sdma.engine import average_goodput, build_scheme, run_trial, run_trials
from sdma.errors import SimulationError, error_line
from sdma.experiments import run_experiment

__all__ = [
    "__version__",
    "ExperimentSpec",
    "SimConfig",
    "load_spec",
    "build_scheme",
    "run_trial",
    "run_trials",
    "average_goodput",
    "run_experiment",
    "SimulationError",
    "error_line",
]
