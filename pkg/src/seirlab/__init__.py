"""Numerical toolkit for SEIR epidemic models: equilibria, stability,
bifurcation coefficients, sensitivity indices and RK4 simulation."""

__version__ = "0.1.0"

from .equilibria import dfe, endemic_equilibrium, next_generation_matrix, r0
from .errors import (
    DegenerateMeasurementError,
    InvalidArgumentError,
    NumericalDomainError,
    NumericalError,
    NumericalFailureError,
    PreconditionError,
    SeirlabError,
    UnsupportedDimensionError,
)
from .integrate import StepConfig, Trajectory, convergence_order, rk4_step, simulate
from .model import (
    BackwardModelParams,
    ClassicalSeirParams,
    DynamicalSystem,
    ModifiedSeirParams,
    backward_model_system,
    classical_seir_system,
    modified_seir_system,
)
