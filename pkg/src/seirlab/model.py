"""Right-hand sides of the three compartmental systems and shared plumbing.

State vectors are plain 1-D float ``numpy`` arrays. For the SEIR systems the
order is always ``(S, E, I, R)``; for the four-class backward-bifurcation
system it is ``(x1, x2, x3, x4)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, fields
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidArgumentError, NumericalDomainError

logger = logging.getLogger(__name__)

SEIR_LABELS = ("S", "E", "I", "R")
BACKWARD_LABELS = ("x1", "x2", "x3", "x4")

# Fixed-step RK4 may undershoot zero by a hair; anything within this fraction
# of the total population is clamped, anything beyond is an error.
CLAMP_TOLERANCE = 1e-9


def _check_positive(obj) -> None:
    for f in fields(obj):
        value = getattr(obj, f.name)
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise InvalidArgumentError(f"parameter {f.name!r} must be a number, got {value!r}")
        if not math.isfinite(value) or value <= 0.0:
            raise InvalidArgumentError(
                f"parameter {f.name!r} must be positive and finite, got {value!r}"
            )
        object.__setattr__(obj, f.name, value)


@dataclass(frozen=True)
class ModifiedSeirParams:
    """Rates of the SEIR model with recruitment ``tau`` and natural death ``mu``."""

    tau: float
    mu: float
    beta: float
    epsilon: float
    gamma: float

    def __post_init__(self):
        _check_positive(self)

    @classmethod
    def table3(cls, tau: Optional[float] = None) -> "ModifiedSeirParams":
        """The assumed values beta=0.25, epsilon=0.06, gamma=0.07, mu=0.005.

        No recruitment rate is given with these values; by default ``tau = mu``
        so that the disease-free population is 1.
        """
        mu = 0.005
        return cls(tau=mu if tau is None else tau, mu=mu, beta=0.25, epsilon=0.06, gamma=0.07)

    def replace(self, **changes) -> "ModifiedSeirParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return type(self)(**values)


@dataclass(frozen=True)
class ClassicalSeirParams:
    """Closed-population SEIR with frequency-dependent incidence ``beta*S*I/n``."""

    beta: float
    epsilon: float
    gamma: float
    n: float

    def __post_init__(self):
        _check_positive(self)

    @classmethod
    def table5(cls) -> "ClassicalSeirParams":
        return cls(beta=0.95, epsilon=0.5, gamma=0.09, n=1000.0)


@dataclass(frozen=True)
class BackwardModelParams:
    beta1: float
    beta2: float
    epsilon: float
    phi: float
    sigma: float
    gamma: float
    delta: float
    alpha: float

    def __post_init__(self):
        _check_positive(self)

    def replace(self, **changes) -> "BackwardModelParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return type(self)(**values)


TABLE6_INITIAL = (960.0, 10.0, 30.0, 0.0)


def as_state(values, dimension: Optional[int] = None) -> np.ndarray:
    """Convert ``values`` to a finite 1-D float array, checking its length."""
    x = np.array(values, dtype=float).reshape(-1)
    if dimension is not None and x.shape[0] != dimension:
        raise InvalidArgumentError(f"state must have length {dimension}, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError(f"state has non-finite entries: {x.tolist()}")
    return x


def check_population_state(values, dimension: Optional[int] = None) -> np.ndarray:
    """Like :func:`as_state` but also rejects negative compartments."""
    x = as_state(values, dimension)
    if np.any(x < 0):
        raise InvalidArgumentError(f"population state has negative entries: {x.tolist()}")
    return x


def clamp_population(x: np.ndarray, *, step: Optional[int] = None) -> np.ndarray:
    """Zero out tiny negative undershoot; raise on anything larger.

    The allowed undershoot is ``CLAMP_TOLERANCE * N`` with ``N`` the total
    absolute mass of the state (1 if the state is empty).
    """
    if not np.any(x < 0):
        return x
    scale = float(np.sum(np.abs(x))) or 1.0
    floor = -CLAMP_TOLERANCE * scale
    worst = float(x.min())
    where = "" if step is None else f" at step {step}"
    if worst < floor:
        raise NumericalDomainError(
            f"state went negative beyond tolerance{where}: min entry {worst!r} < {floor!r}"
        )
    logger.warning("clamping negative undershoot %.3g to zero%s", worst, where)
    out = x.copy()
    out[out < 0] = 0.0
    return out


def total_population(state) -> float:
    x = as_state(state, 4)
    return float(x[0] + x[1] + x[2] + x[3])


def modified_seir_rhs(params: ModifiedSeirParams, state) -> np.ndarray:
    S, E, I, R = as_state(state, 4)
    p = params
    return np.array(
        [
            p.tau - p.mu * S - p.beta * S * I,
            p.beta * S * I - (p.mu + p.epsilon) * E,
            p.epsilon * E - (p.mu + p.gamma) * I,
            p.gamma * I - p.mu * R,
        ]
    )


def modified_seir_jacobian(params: ModifiedSeirParams, state) -> np.ndarray:
    S, E, I, R = as_state(state, 4)
    p = params
    return np.array(
        [
            [-p.mu - p.beta * I, 0.0, -p.beta * S, 0.0],
            [p.beta * I, -(p.mu + p.epsilon), p.beta * S, 0.0],
            [0.0, p.epsilon, -(p.mu + p.gamma), 0.0],
            [0.0, 0.0, p.gamma, -p.mu],
        ]
    )


def classical_seir_rhs(params: ClassicalSeirParams, state) -> np.ndarray:
    S, E, I, R = as_state(state, 4)
    p = params
    incidence = p.beta * S * I / p.n
    return np.array(
        [
            -incidence,
            incidence - p.epsilon * E,
            p.epsilon * E - p.gamma * I,
            p.gamma * I,
        ]
    )


def classical_seir_jacobian(params: ClassicalSeirParams, state) -> np.ndarray:
    S, E, I, R = as_state(state, 4)
    p = params
    bi, bs = p.beta * I / p.n, p.beta * S / p.n
    return np.array(
        [
            [-bi, 0.0, -bs, 0.0],
            [bi, -p.epsilon, bs, 0.0],
            [0.0, p.epsilon, -p.gamma, 0.0],
            [0.0, 0.0, p.gamma, 0.0],
        ]
    )


def backward_model_rhs(params: BackwardModelParams, state) -> np.ndarray:
    x1, x2, x3, x4 = as_state(state, 4)
    p = params
    return np.array(
        [
            -(p.beta1 + p.beta2) * x1 * x3 + p.epsilon * x2 + p.alpha * x4,
            p.beta1 * x1 * x3 - p.epsilon * x2 - p.phi * x2 - p.sigma * x2,
            p.beta2 * x1 * x3 - p.gamma * x3 - p.delta * x3 + p.phi * x2,
            p.gamma * x3 - p.alpha * x4,
        ]
    )


def backward_model_jacobian(params: BackwardModelParams, state) -> np.ndarray:
    x1, x2, x3, x4 = as_state(state, 4)
    p = params
    k = p.epsilon + p.phi + p.sigma
    return np.array(
        [
            [-(p.beta1 + p.beta2) * x3, p.epsilon, -(p.beta1 + p.beta2) * x1, p.alpha],
            [p.beta1 * x3, -k, p.beta1 * x1, 0.0],
            [p.beta2 * x3, p.phi, p.beta2 * x1 - p.gamma - p.delta, 0.0],
            [0.0, 0.0, p.gamma, -p.alpha],
        ]
    )


@dataclass(frozen=True)
class DynamicalSystem:
    """An autonomous or time-dependent vector field ``x' = rhs(t, x)``.

    ``nonnegative`` marks population models whose trajectories are clamped
    at zero (see :func:`clamp_population`) during integration.
    """

    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "system"
    labels: Optional[Sequence[str]] = None
    nonnegative: bool = False

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise InvalidArgumentError(f"dimension must be a positive integer, got {self.dimension!r}")

    def __call__(self, t: float, x) -> np.ndarray:
        out = np.asarray(self.rhs(t, x), dtype=float).reshape(-1)
        if out.shape[0] != self.dimension:
            raise InvalidArgumentError(
                f"{self.name}: rhs returned length {out.shape[0]}, expected {self.dimension}"
            )
        return out


def modified_seir_system(params: ModifiedSeirParams) -> DynamicalSystem:
    return DynamicalSystem(
        4,
        lambda t, x: modified_seir_rhs(params, x),
        lambda x: modified_seir_jacobian(params, x),
        name="seir-modified",
        labels=SEIR_LABELS,
        nonnegative=True,
    )


def classical_seir_system(params: ClassicalSeirParams) -> DynamicalSystem:
    return DynamicalSystem(
        4,
        lambda t, x: classical_seir_rhs(params, x),
        lambda x: classical_seir_jacobian(params, x),
        name="seir-classical",
        labels=SEIR_LABELS,
        nonnegative=True,
    )


def backward_model_system(params: BackwardModelParams) -> DynamicalSystem:
    return DynamicalSystem(
        4,
        lambda t, x: backward_model_rhs(params, x),
        lambda x: backward_model_jacobian(params, x),
        name="backward4",
        labels=BACKWARD_LABELS,
        nonnegative=True,
    )


def linear_system(matrix) -> DynamicalSystem:
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgumentError("linear system needs a square matrix")
    return DynamicalSystem(m.shape[0], lambda t, x: m @ np.asarray(x, dtype=float), lambda x: m.copy(), name="linear")


def default_jacobian_steps(point: np.ndarray) -> np.ndarray:
    return math.sqrt(np.finfo(float).eps) * np.maximum(1.0, np.abs(point))


def numeric_jacobian(system: DynamicalSystem, point, step=None, t: float = 0.0) -> np.ndarray:
    """Central-difference Jacobian; column ``j`` perturbs coordinate ``j``.

    ``step`` is an absolute step applied to every coordinate; ``None`` uses
    ``sqrt(eps) * max(1, |x_j|)`` per coordinate.
    """
    x = as_state(point, system.dimension)
    if step is None:
        h = default_jacobian_steps(x)
    else:
        if not step > 0:
            raise InvalidArgumentError(f"step must be positive, got {step!r}")
        h = np.full(x.shape, float(step))
    n = system.dimension
    jac = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h[j]
        plus = system(t, x + e)
        minus = system(t, x - e)
        if not (np.all(np.isfinite(plus)) and np.all(np.isfinite(minus))):
            raise NumericalDomainError(f"{system.name}: non-finite rhs while differencing coordinate {j}")
        jac[:, j] = (plus - minus) / (2.0 * h[j])
    return jac
