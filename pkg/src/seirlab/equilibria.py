"""Equilibria of the modified SEIR model and its basic reproduction number."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArgumentError
from .model import ModifiedSeirParams, modified_seir_rhs

DFE = "DFE"
EE = "EE"


@dataclass(frozen=True)
class ReproductionNumber:
    """Next-generation construction at susceptible level ``s0``.

    ``f_matrix`` holds new infections (only the ``beta*s0`` entry), and
    ``v_matrix`` holds the transfers out of and between the infected classes
    ``(E, I)``. ``value`` is the spectral radius of ``ngm = F V^-1``.
    """

    value: float
    s0: float
    f_matrix: np.ndarray
    v_matrix: np.ndarray
    ngm: np.ndarray


@dataclass(frozen=True)
class EquilibriumPoint:
    state: np.ndarray
    kind: str
    residual: float


def _spectral_radius_2x2(m: np.ndarray) -> float:
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = complex(tr * tr - 4.0 * det) ** 0.5
    return float(max(abs((tr + disc) / 2), abs((tr - disc) / 2)))


def next_generation_matrix(params: ModifiedSeirParams, s0: float) -> ReproductionNumber:
    if not s0 > 0:
        raise InvalidArgumentError(f"s0 must be positive, got {s0!r}")
    p = params
    f = np.array([[0.0, p.beta * s0], [0.0, 0.0]])
    v = np.array([[p.mu + p.epsilon, 0.0], [-p.epsilon, p.mu + p.gamma]])
    # V is lower triangular, so its inverse is written out rather than solved.
    a, c = p.mu + p.epsilon, p.mu + p.gamma
    v_inv = np.array([[1.0 / a, 0.0], [p.epsilon / (a * c), 1.0 / c]])
    ngm = f @ v_inv
    return ReproductionNumber(_spectral_radius_2x2(ngm), float(s0), f, v, ngm)


def r0(params: ModifiedSeirParams) -> float:
    """``eps*beta*tau / (mu*(mu+eps)*(mu+gamma))``, i.e. evaluated at S0 = tau/mu."""
    p = params
    return p.epsilon * p.beta * p.tau / (p.mu * (p.mu + p.epsilon) * (p.mu + p.gamma))


def _residual(params, state) -> float:
    return float(np.max(np.abs(modified_seir_rhs(params, state))))


def dfe(params: ModifiedSeirParams) -> EquilibriumPoint:
    state = np.array([params.tau / params.mu, 0.0, 0.0, 0.0])
    return EquilibriumPoint(state, DFE, _residual(params, state))


def endemic_equilibrium(params: ModifiedSeirParams) -> Optional[EquilibriumPoint]:
    """Positive steady state, or ``None`` when ``r0(params) <= 1``."""
    p = params
    if r0(p) <= 1.0:
        return None
    a, c = p.mu + p.epsilon, p.mu + p.gamma
    s = c * a / (p.beta * p.epsilon)
    i = (p.tau * p.beta * p.epsilon - p.mu * c * a) / (p.beta * c * a)
    if not i > 0:
        # r0 > 1 by a rounding hair but the numerator still cancels to <= 0.
        return None
    e = c * i / p.epsilon
    r = p.gamma * i / p.mu
    state = np.array([s, e, i, r])
    return EquilibriumPoint(state, EE, _residual(p, state))


def equilibria_summary(params: ModifiedSeirParams) -> dict:
    """Everything the ``equilibria`` command reports, as plain values."""
    value = r0(params)
    ee = endemic_equilibrium(params)
    return {
        "r0": value,
        "threshold": value == 1.0,
        "dfe": dfe(params),
        "ee": ee,
    }
