"""Synchronized equilibria of the finite Kuramoto model with evenly spaced frequencies."""

__version__ = "0.1.0"

from ._validation import ConsistencyError, NumericalFailure
from .model import ModelConfig, km_jacobian, km_vector_field, lift_state, reduce_state, wrap_angle
from .equilibria import ChiCurve, Equilibrium, SignSequence, all_equilibria, equilibria_for
from .stability import StabilityReport, equilibrium_report, spectrum
from .bifurcation import BifurcationEvent, branch_diagram, count_events, events_for
from .continuum import ContinuumSolution, FlipSet, build_discontinuous, continuous_solution, discretize
from .dynamics import Trajectory, integrate

__all__ = [
    "__version__",
    "ConsistencyError", "NumericalFailure",
    "ModelConfig", "km_jacobian", "km_vector_field", "lift_state", "reduce_state", "wrap_angle",
    "ChiCurve", "Equilibrium", "SignSequence", "all_equilibria", "equilibria_for",
    "StabilityReport", "equilibrium_report", "spectrum",
    "BifurcationEvent", "branch_diagram", "count_events", "events_for",
    "ContinuumSolution", "FlipSet", "build_discontinuous", "continuous_solution", "discretize",
    "Trajectory", "integrate",
]
