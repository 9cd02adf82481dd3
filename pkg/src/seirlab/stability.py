"""Local stability of the SEIR equilibria and the Lyapunov check at the DFE."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from .equilibria import EquilibriumPoint, dfe, endemic_equilibrium, r0
from .errors import InvalidArgumentError, PreconditionError
from .model import ModifiedSeirParams, modified_seir_jacobian
from .polynomial import (
    CharPoly,
    characteristic_polynomial,
    deflate,
    descartes_positive_root_bound,
    matrix_eigenvalues,
    routh_hurwitz_cubic,
)

DEFAULT_LYAPUNOV_SEED = 20240101


class Verdict(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    NONHYPERBOLIC = "nonhyperbolic"

    def __str__(self):
        return self.value


@dataclass
class StabilityReport:
    equilibrium: EquilibriumPoint
    eigenvalues: np.ndarray
    verdict: Verdict
    char_poly: CharPoly
    criteria: Dict[str, bool] = field(default_factory=dict)
    coefficients: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class LyapunovCertificate:
    sample_count: int
    seed: int
    region_radius: float
    max_V_violation: float
    max_dVdt: float
    identity_residual: float
    verdict: bool


def hyperbolicity_tolerance(eigenvalues) -> float:
    scale = float(np.max(np.abs(eigenvalues))) if len(eigenvalues) else 0.0
    return 1e-9 * max(1.0, scale)


def classify_stability(eigenvalues: Sequence[complex], tol: Optional[float] = None) -> Verdict:
    ev = np.asarray(list(eigenvalues), dtype=complex)
    if ev.size == 0:
        raise InvalidArgumentError("need at least one eigenvalue")
    if tol is None:
        tol = hyperbolicity_tolerance(ev)
    if not tol > 0:
        raise InvalidArgumentError(f"tol must be positive, got {tol!r}")
    re = ev.real
    if np.all(re < -tol):
        return Verdict.STABLE
    if np.any(re > tol):
        return Verdict.UNSTABLE
    return Verdict.NONHYPERBOLIC


def dfe_quadratic_coefficients(params: ModifiedSeirParams):
    """``(a1, a2)`` of the quadratic factor left after removing ``(lambda+mu)^2``.

    ``a2 = (mu+eps)(mu+gamma)(1 - R0)`` so its sign is the threshold test.
    """
    p = params
    a1 = 2 * p.mu + p.epsilon + p.gamma
    a2 = (p.mu + p.epsilon) * (p.mu + p.gamma) * (1.0 - r0(p))
    return a1, a2


def dfe_stability_report(params: ModifiedSeirParams) -> StabilityReport:
    eq = dfe(params)
    jac = modified_seir_jacobian(params, eq.state)
    poly = characteristic_polynomial(jac)
    eigenvalues = matrix_eigenvalues(jac)
    a1, a2 = dfe_quadratic_coefficients(params)
    near_mu = np.sort(np.abs(eigenvalues + params.mu))[:2]
    criteria = {
        "descartes_no_positive_root": descartes_positive_root_bound([1.0, a1, a2]) == 0,
        "quadratic_coefficients_positive": a1 > 0 and a2 > 0,
        "double_eigenvalue_minus_mu": bool(np.all(near_mu <= 1e-9)),
    }
    return StabilityReport(
        eq,
        eigenvalues,
        classify_stability(eigenvalues),
        poly,
        criteria,
        {"a1": a1, "a2": a2, "r0": r0(params)},
    )


def ee_cubic_coefficients(params: ModifiedSeirParams, s_star: float, i_star: float):
    """Closed forms of ``A, B, C`` in ``(lambda+mu)(lambda^3 + A lambda^2 + B lambda + C)``."""
    p = params
    m = p.mu + p.beta * i_star
    A = 3 * p.mu + p.epsilon + p.gamma + p.beta * i_star
    B = m * (2 * p.mu + p.epsilon + p.gamma) + (p.mu + p.epsilon) * (p.mu + p.gamma) - p.beta * s_star * p.epsilon
    C = m * ((p.mu + p.epsilon) * (p.mu + p.gamma) - p.beta * p.epsilon * s_star) + p.beta**2 * s_star * i_star * p.epsilon
    return A, B, C


def ee_stability_report(params: ModifiedSeirParams) -> StabilityReport:
    eq = endemic_equilibrium(params)
    if eq is None:
        raise PreconditionError(f"no endemic equilibrium: R0 = {r0(params)!r} <= 1")
    s, _, i, _ = eq.state
    jac = modified_seir_jacobian(params, eq.state)
    poly = characteristic_polynomial(jac)
    eigenvalues = matrix_eigenvalues(jac)
    # The R row decouples, leaving (lambda + mu) times a cubic.
    (one, A, B, C), remainder = deflate(poly.coefficients, -params.mu)
    A_cf, B_cf, C_cf = ee_cubic_coefficients(params, s, i)
    verdict = classify_stability(eigenvalues)
    rh = routh_hurwitz_cubic(A, B, C)
    criteria = {
        "routh_hurwitz": rh,
        "routh_hurwitz_closed_form": routh_hurwitz_cubic(A_cf, B_cf, C_cf),
        "agrees_with_eigenvalues": rh == (verdict is Verdict.STABLE),
        "eigenvalue_minus_mu": bool(np.min(np.abs(eigenvalues + params.mu)) <= 1e-9),
    }
    coefficients = {
        "A": A, "B": B, "C": C,
        "A_closed_form": A_cf, "B_closed_form": B_cf, "C_closed_form": C_cf,
        "deflation_remainder": remainder,
        "r0": r0(params),
    }
    return StabilityReport(eq, eigenvalues, verdict, poly, criteria, coefficients)


# -- Lyapunov function V = x + y + z + w around the DFE ------------------------


def shifted_rhs(params: ModifiedSeirParams, shifted) -> np.ndarray:
    """Vector field in coordinates ``x = S - tau/mu, y = E, z = I, w = R``."""
    x, y, z, w = np.asarray(shifted, dtype=float)
    p = params
    s0 = p.tau / p.mu
    return np.array(
        [
            -p.mu * x - p.beta * x * z - p.beta * s0 * z,
            p.beta * x * z + p.beta * s0 * z - (p.mu + p.epsilon) * y,
            p.epsilon * y - (p.mu + p.gamma) * z,
            p.gamma * z - p.mu * w,
        ]
    )


def lyapunov_value(shifted) -> float:
    return float(np.sum(shifted))


def lyapunov_derivative(params: ModifiedSeirParams, shifted) -> float:
    # grad V is the all-ones vector.
    return float(np.sum(shifted_rhs(params, shifted)))


def sample_shifted_region(samples: int, region_radius: float, seed: int) -> np.ndarray:
    """Points uniform in the nonnegative part of the 4-ball of ``region_radius``."""
    rng = np.random.default_rng(seed)
    direction = np.abs(rng.standard_normal((samples, 4)))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = region_radius * rng.random(samples) ** 0.25
    return direction * radius[:, None]


def lyapunov_dfe_certificate(
    params: ModifiedSeirParams,
    samples: int = 10_000,
    region_radius: float = 1.0,
    seed: int = DEFAULT_LYAPUNOV_SEED,
    tol: float = 1e-10,
) -> LyapunovCertificate:
    """Check V > 0, dV/dt <= 0 and dV/dt = -mu*V on sampled shifted states."""
    if samples < 1:
        raise InvalidArgumentError("samples must be at least 1")
    if not region_radius > 0:
        raise InvalidArgumentError("region_radius must be positive")
    pts = sample_shifted_region(samples, region_radius, seed)
    v = pts.sum(axis=1)
    dv = np.array([lyapunov_derivative(params, pt) for pt in pts])
    off_origin = np.any(pts != 0, axis=1)
    max_v_violation = float(np.max(-v[off_origin])) if off_origin.any() else -np.inf
    max_dvdt = float(np.max(dv))
    identity = float(np.max(np.abs(dv + params.mu * v)))
    verdict = max_v_violation < 0 and max_dvdt <= tol and identity <= tol
    return LyapunovCertificate(samples, seed, region_radius, max_v_violation, max_dvdt, identity, bool(verdict))
