"""Normal-form bifurcation catalog and center-manifold coefficients.

The center-manifold part computes the pair ``(a, b)`` used to decide whether
the endemic branch leaves ``R0 = 1`` forwards or backwards::

    a = sum_{k,i,j} v_k w_i w_j d2 f_k / dx_i dx_j
    b = sum_{k,i}   v_k w_i     d2 f_k / dx_i dp

with ``w`` / ``v`` the right / left null vectors of the Jacobian at the
critical parameter. Second partials are taken by central differences.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .errors import InvalidArgumentError, PreconditionError
from .integrate import StepConfig, simulate
from .model import (
    BackwardModelParams,
    DynamicalSystem,
    ModifiedSeirParams,
    as_state,
    backward_model_jacobian,
    backward_model_rhs,
)
from .polynomial import matrix_eigenvalues

# ---------------------------------------------------------------------------
# One- and two-dimensional normal forms


class FormKind(str, enum.Enum):
    SADDLE_NODE = "saddle-node"
    TRANSCRITICAL = "transcritical"
    PITCHFORK = "pitchfork"
    HOPF = "hopf"

    def __str__(self):
        return self.value


STABLE, UNSTABLE, NEUTRAL = "stable", "unstable", "neutral"


@dataclass(frozen=True)
class NormalForm:
    """``x' = x^2 + a``, ``x' = a x - b x^2``, ``x' = x^3 - a x`` or the radial
    Hopf equation ``r' = a r - r^3`` (with ``theta' = 1``)."""

    kind: FormKind
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", FormKind(self.kind))
        if self.kind is FormKind.TRANSCRITICAL and self.b == 0:
            raise InvalidArgumentError("transcritical form needs b != 0")

    def f(self, x, a=None):
        a = self.a if a is None else a
        if self.kind is FormKind.SADDLE_NODE:
            return x * x + a
        if self.kind is FormKind.TRANSCRITICAL:
            return a * x - self.b * x * x
        if self.kind is FormKind.PITCHFORK:
            return x**3 - a * x
        return a * x - x**3

    def dfdx(self, x, a=None):
        a = self.a if a is None else a
        if self.kind is FormKind.SADDLE_NODE:
            return 2 * x
        if self.kind is FormKind.TRANSCRITICAL:
            return a - 2 * self.b * x
        if self.kind is FormKind.PITCHFORK:
            return 3 * x * x - a
        return a - 3 * x * x


@dataclass(frozen=True)
class BranchPoint:
    param: float
    x: float
    stability: str


def _stability_from_slope(slope: float) -> str:
    if slope < 0:
        return STABLE
    if slope > 0:
        return UNSTABLE
    return NEUTRAL


def normal_form_equilibria(form: NormalForm, param: Optional[float] = None) -> List[BranchPoint]:
    """Real equilibria sorted by ``x``; coincident roots are reported once.

    For the Hopf form the equilibria are radii, so only ``r >= 0`` is kept.
    """
    a = form.a if param is None else float(param)
    kind = form.kind
    if kind is FormKind.SADDLE_NODE:
        xs = [] if a > 0 else ([0.0] if a == 0 else [-math.sqrt(-a), math.sqrt(-a)])
    elif kind is FormKind.TRANSCRITICAL:
        xs = sorted({0.0, a / form.b})
    elif kind is FormKind.PITCHFORK:
        xs = [0.0] if a <= 0 else [-math.sqrt(a), 0.0, math.sqrt(a)]
    else:
        xs = [0.0] if a <= 0 else [0.0, math.sqrt(a)]
    return [BranchPoint(a, x, _stability_from_slope(form.dfdx(x, a))) for x in xs]


def parameter_grid(param_min: float, param_max: float, n: int) -> np.ndarray:
    # min + span*i/(n-1) hits symmetric midpoints (e.g. 0 on [-1, 1]) exactly.
    i = np.arange(n, dtype=float)
    return param_min + (param_max - param_min) * i / (n - 1)


def sweep_diagram(form: NormalForm, param_min: float, param_max: float, n: int) -> List[BranchPoint]:
    if n < 2:
        raise InvalidArgumentError("need at least two parameter values")
    if not param_min < param_max:
        raise InvalidArgumentError("param_min must be below param_max")
    points = []
    for a in parameter_grid(param_min, param_max, n):
        points.extend(normal_form_equilibria(form, a))
    return points


def group_by_param(points: List[BranchPoint]) -> dict:
    out: dict = {}
    for pt in points:
        out.setdefault(pt.param, []).append(pt)
    return out


# ---------------------------------------------------------------------------
# Hopf normal form in Cartesian coordinates


def hopf_system(a: float) -> DynamicalSystem:
    def rhs(t, state):
        x, y = state
        r2 = x * x + y * y
        return np.array([a * x - y - x * r2, x + a * y - y * r2])

    def jac(state):
        x, y = state
        return np.array(
            [[a - 3 * x * x - y * y, -1 - 2 * x * y], [1 - 2 * x * y, a - x * x - 3 * y * y]]
        )

    return DynamicalSystem(2, rhs, jac, name=f"hopf(a={a})", labels=("x", "y"))


@dataclass(frozen=True)
class HopfReport:
    a: float
    initial_r: float
    predicted_radius: float
    observed_radius: float
    period_observed: float
    last_radius: float
    converged: bool


def _upward_crossings(times: np.ndarray, y: np.ndarray, x: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero((y[:-1] < 0) & (y[1:] >= 0) & (x[:-1] > 0))
    frac = -y[idx] / (y[idx + 1] - y[idx])
    return times[idx] + frac * (times[idx + 1] - times[idx])


def hopf_limit_cycle_check(a: float, initial_r: float, config: Optional[StepConfig] = None) -> HopfReport:
    """Integrate the planar Hopf example from ``(initial_r, 0)`` and measure the attractor.

    For ``a > 0`` convergence means the mean radius over the final tenth of the
    run is within 1e-3 of ``sqrt(a)`` and the period is within 1% of ``2*pi``.
    For ``a <= 0`` it means the final radius fell below 1e-6 of the initial one.
    A failure to converge is reported through ``converged``, not raised.
    """
    if not initial_r > 0:
        raise InvalidArgumentError("initial_r must be positive")
    if a > 0 and initial_r == math.sqrt(a):
        raise InvalidArgumentError("initial_r must differ from sqrt(a)")
    config = config or StepConfig(t_end=200.0, dt=0.05)
    traj = simulate(hopf_system(a), [initial_r, 0.0], config)
    x, y = traj.states[:, 0], traj.states[:, 1]
    r = np.hypot(x, y)
    tail = slice(int(0.9 * len(r)), None)
    observed = float(np.mean(r[tail]))
    half = len(r) // 2
    crossings = _upward_crossings(traj.times[half:], y[half:], x[half:])
    period = float(np.mean(np.diff(crossings))) if crossings.size >= 2 else float("nan")
    last = float(r[-1])
    if a > 0:
        predicted = math.sqrt(a)
        converged = abs(observed - predicted) <= 1e-3 and abs(period - 2 * math.pi) <= 0.01 * 2 * math.pi
    else:
        predicted = 0.0
        converged = last < 1e-6 * initial_r
    return HopfReport(a, initial_r, predicted, observed, period, last, bool(converged))


# ---------------------------------------------------------------------------
# Center-manifold (Castillo-Chavez & Song) coefficients


class BifurcationDirection(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    DEGENERATE = "degenerate"

    def __str__(self):
        return self.value


def classify_bifurcation(a: float, b: float, tol: float = 1e-12) -> BifurcationDirection:
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    if b > tol and a > tol:
        return BifurcationDirection.BACKWARD
    if b > tol and a < -tol:
        return BifurcationDirection.FORWARD
    return BifurcationDirection.DEGENERATE


@dataclass(frozen=True)
class ParametricSystem:
    """Vector field ``f(x, p)`` with a scalar bifurcation parameter ``p``."""

    dimension: int
    field: Callable[[np.ndarray, float], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    name: str = "system"
    param_name: str = "p"
    pivot: int = -1  # component of w fixed to 1

    def __call__(self, x, p) -> np.ndarray:
        return np.asarray(self.field(np.asarray(x, dtype=float), float(p)), dtype=float)

    def at(self, p: float) -> DynamicalSystem:
        jac = None if self.jacobian is None else (lambda x: self.jacobian(x, p))
        return DynamicalSystem(self.dimension, lambda t, x: self(x, p), jac, name=f"{self.name}[{self.param_name}={p}]")


@dataclass
class CenterManifoldCoefficients:
    a: float
    b: float
    critical_param: float
    w: np.ndarray
    v: np.ndarray
    classification: BifurcationDirection
    eigenvalues: np.ndarray
    normalization: str
    notes: List[str] = field(default_factory=list)

    @property
    def v_dot_w(self) -> float:
        return float(self.v @ self.w)


def _jacobian(system: ParametricSystem, x: np.ndarray, p: float) -> np.ndarray:
    if system.jacobian is not None:
        return np.asarray(system.jacobian(x, p), dtype=float)
    from .model import numeric_jacobian

    return numeric_jacobian(system.at(p), x)


def null_vector(matrix: np.ndarray, pivot: Optional[int] = None, iterations: int = 4) -> np.ndarray:
    """Null vector of a matrix with a simple zero eigenvalue.

    Scaled so ``vec[pivot] == 1``, or to unit max-norm when ``pivot`` is None.

    Inverse iteration with a tiny shift: each solve is a Gaussian elimination
    and damps the other eigendirections by ``|shift| / |lambda|``.
    """
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    scale = max(float(np.max(np.abs(m))), 1e-300)
    shift = -1e-8 * scale
    shifted = m - shift * np.eye(n)
    vec = np.ones(n)
    for _ in range(iterations):
        vec = np.linalg.solve(shifted, vec)
        vec /= vec[np.argmax(np.abs(vec))]
    if pivot is None:
        return vec
    if vec[pivot] == 0:
        raise PreconditionError(f"null vector has a zero pivot component {pivot}")
    return vec / vec[pivot]


def _steps(x: np.ndarray) -> np.ndarray:
    # eps**(1/4) balances truncation against roundoff for second differences.
    return np.finfo(float).eps ** 0.25 * np.maximum(1.0, np.abs(x))


def second_derivative_tensor(system: ParametricSystem, x, p: float) -> np.ndarray:
    """``H[k, i, j] = d2 f_k / dx_i dx_j`` by central differences."""
    x = as_state(x, system.dimension)
    n = system.dimension
    h = _steps(x)
    f0 = system(x, p)
    H = np.empty((n, n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        H[:, i, i] = (system(x + ei, p) - 2 * f0 + system(x - ei, p)) / h[i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h[j]
            val = (
                system(x + ei + ej, p) - system(x + ei - ej, p) - system(x - ei + ej, p) + system(x - ei - ej, p)
            ) / (4 * h[i] * h[j])
            H[:, i, j] = val
            H[:, j, i] = val
    return H


def parameter_mixed_tensor(system: ParametricSystem, x, p: float) -> np.ndarray:
    """``M[k, i] = d2 f_k / dx_i dp`` by central differences."""
    x = as_state(x, system.dimension)
    n = system.dimension
    h = _steps(x)
    hp = float(_steps(np.array([p]))[0])
    M = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        M[:, i] = (
            system(x + ei, p + hp) - system(x + ei, p - hp) - system(x - ei, p + hp) + system(x - ei, p - hp)
        ) / (4 * h[i] * hp)
    return M


def contract_coefficients(H: np.ndarray, M: np.ndarray, v: np.ndarray, w: np.ndarray):
    a = float(np.einsum("k,kij,i,j->", v, H, w, w))
    b = float(np.einsum("k,ki,i->", v, M, w))
    return a, b


def _check_simple_zero(eigenvalues: np.ndarray):
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    zero_tol = 1e-8 * scale
    near_zero = np.abs(eigenvalues) <= zero_tol
    if near_zero.sum() == 0:
        raise PreconditionError(f"Jacobian has no zero eigenvalue: {eigenvalues}")
    if near_zero.sum() > 1:
        raise PreconditionError(f"zero eigenvalue is not simple: {eigenvalues}")
    others = eigenvalues[~near_zero]
    if np.any(others.real >= -zero_tol):
        raise PreconditionError(f"non-zero eigenvalues must have negative real part: {eigenvalues}")


def center_manifold_coefficients(
    system: ParametricSystem,
    equilibrium,
    critical_param: float,
    pivot: Optional[int] = None,
    left_pivot: Optional[int] = None,
    tol: float = 1e-12,
) -> CenterManifoldCoefficients:
    """Coefficients ``(a, b)`` at a simple zero eigenvalue.

    ``w`` is scaled so ``w[pivot] == 1`` (default: the system's pivot). ``v``
    is scaled so ``v . w == 1`` unless ``left_pivot`` is given, in which case
    ``v[left_pivot] == 1`` instead.
    """
    x = as_state(equilibrium, system.dimension)
    p = float(critical_param)
    residual = float(np.max(np.abs(system(x, p))))
    if residual > 1e-10 * max(1.0, float(np.max(np.abs(x)))):
        raise PreconditionError(f"point is not an equilibrium at {system.param_name}={p}: residual {residual:.3g}")
    jac = _jacobian(system, x, p)
    eigenvalues = matrix_eigenvalues(jac)
    _check_simple_zero(eigenvalues)
    pivot = system.pivot if pivot is None else pivot
    w = null_vector(jac, pivot)
    if left_pivot is None:
        v = null_vector(jac.T)
        v = v / (v @ w)
        normalization = f"w[{pivot % system.dimension}] = 1, v.w = 1"
    else:
        v = null_vector(jac.T, left_pivot)
        normalization = f"w[{pivot % system.dimension}] = 1, v[{left_pivot % system.dimension}] = 1"
    H = second_derivative_tensor(system, x, p)
    M = parameter_mixed_tensor(system, x, p)
    a, b = contract_coefficients(H, M, v, w)
    return CenterManifoldCoefficients(a, b, p, w, v, classify_bifurcation(a, b, tol), eigenvalues, normalization)


# -- built-in systems --------------------------------------------------------


def seir3_system(params: ModifiedSeirParams) -> ParametricSystem:
    """``(S, E, I)`` block of the modified SEIR model with ``beta`` as parameter.

    ``R`` does not feed back into the other classes and is dropped.
    """
    p = params

    def field_(x, beta):
        s, e, i = x
        return np.array(
            [
                p.tau - beta * s * i - p.mu * s,
                beta * s * i - (p.mu + p.epsilon) * e,
                p.epsilon * e - (p.mu + p.gamma) * i,
            ]
        )

    def jac(x, beta):
        s, e, i = x
        return np.array(
            [
                [-beta * i - p.mu, 0.0, -beta * s],
                [beta * i, -(p.mu + p.epsilon), beta * s],
                [0.0, p.epsilon, -(p.mu + p.gamma)],
            ]
        )

    return ParametricSystem(3, field_, jac, name="seir3", param_name="beta", pivot=2)


def seir3_critical_beta(params: ModifiedSeirParams) -> float:
    """Transmission rate at which ``R0 = 1``."""
    p = params
    return p.mu * (p.mu + p.epsilon) * (p.mu + p.gamma) / (p.epsilon * p.tau)


def seir3_closed_form(params: ModifiedSeirParams) -> dict:
    """Analytic ``w``, ``v`` (``w_3 = 1``, ``v . w = 1``), ``a`` and ``b`` at the DFE."""
    p = params
    beta = seir3_critical_beta(p)
    s0 = p.tau / p.mu
    w = np.array([-beta * s0 / p.mu, beta * s0 / (p.mu + p.epsilon), 1.0])
    v_raw = np.array([0.0, (p.mu + p.gamma) / (beta * s0), 1.0])
    v = v_raw / (v_raw @ w)
    # Only d2f1/dx1dx3 = -beta and d2f2/dx1dx3 = +beta are non-zero; each
    # appears twice in the symmetric double sum.
    a = 2 * beta * w[0] * w[2] * (v[1] - v[0])
    # d2f1/dx3 dbeta = -S0, d2f2/dx3 dbeta = +S0.
    b = s0 * w[2] * (v[1] - v[0])
    return {"beta_star": beta, "w": w, "v": v, "a": a, "b": b}


def seir3_center_manifold(params: ModifiedSeirParams) -> CenterManifoldCoefficients:
    system = seir3_system(params)
    beta = seir3_critical_beta(params)
    dfe = np.array([params.tau / params.mu, 0.0, 0.0])
    return center_manifold_coefficients(system, dfe, beta)


def backward4_system(params: BackwardModelParams) -> ParametricSystem:
    """The four-class backward-bifurcation model with ``beta2`` as parameter."""

    def field_(x, beta2):
        return backward_model_rhs(params.replace(beta2=beta2), x)

    def jac(x, beta2):
        return backward_model_jacobian(params.replace(beta2=beta2), x)

    return ParametricSystem(4, field_, jac, name="backward4", param_name="beta2", pivot=2)


def backward4_critical_beta2(params: BackwardModelParams, s0: float = 1.0) -> float:
    p = params
    k = p.epsilon + p.phi + p.sigma
    return ((p.gamma + p.delta) * k - p.beta1 * p.phi * s0) / (k * s0)


def backward4_center_manifold(
    params: BackwardModelParams, s0: float = 1.0, w1: float = 1.0
) -> CenterManifoldCoefficients:
    """Coefficients for the backward model at its disease-free state ``(s0, 0, 0, 0)``.

    Every ``(s, 0, 0, 0)`` is an equilibrium, so the ``x1`` column of the
    Jacobian vanishes and at the critical ``beta2`` the zero eigenvalue is
    double (and defective). The generic routine therefore refuses this system.
    Here the null vectors are taken from the infected block ``(x2, x3, x4)``,
    whose zero eigenvalue is simple, and lifted: ``v = (0, v_block)`` is a true
    left null vector; ``w = (w1, w_block)`` is a generalized null vector with a
    free first component ``w1``. Normalization is ``w3 = 1`` and ``v2 = 1``.
    """
    if not s0 > 0:
        raise InvalidArgumentError("s0 must be positive")
    beta2 = backward4_critical_beta2(params, s0)
    if not beta2 > 0:
        raise PreconditionError(f"critical beta2 = {beta2!r} is not positive for these parameters")
    system = backward4_system(params)
    x = np.array([s0, 0.0, 0.0, 0.0])
    jac = _jacobian(system, x, beta2)
    eigenvalues = matrix_eigenvalues(jac)
    block = jac[1:, 1:]
    _check_simple_zero(matrix_eigenvalues(block))
    w = np.concatenate([[w1], null_vector(block, 1)])
    v = np.concatenate([[0.0], null_vector(block.T, 0)])
    H = second_derivative_tensor(system, x, beta2)
    M = parameter_mixed_tensor(system, x, beta2)
    a, b = contract_coefficients(H, M, v, w)
    notes = [
        "zero eigenvalue is double: x1 spans a line of disease-free equilibria",
        f"J.w = {float((jac @ w)[0]):.17g} * e1 (generalized null vector)",
        f"w1 = {w1!r} is free; the sign of a follows the sign of w1",
    ]
    return CenterManifoldCoefficients(
        a, b, beta2, w, v, classify_bifurcation(a, b), eigenvalues, "w[2] = 1, v[1] = 1", notes
    )


def backward4_closed_form(params: BackwardModelParams, s0: float = 1.0, w1: float = 1.0) -> dict:
    p = params
    k = p.epsilon + p.phi + p.sigma
    w = np.array([w1, p.beta1 * s0 / k, 1.0, p.gamma / p.alpha])
    v = np.array([0.0, 1.0, k / p.phi, 0.0])
    beta2 = backward4_critical_beta2(p, s0)
    a = 2 * w1 * (p.beta1 * v[1] + beta2 * v[2])
    b = s0 * k / p.phi
    return {"beta2_star": beta2, "w": w, "v": v, "a": a, "b": b}
