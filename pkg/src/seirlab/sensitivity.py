"""Normalized sensitivity indices ``S_p = (dR0/dp) * p / R0``.

By default ``R0 = eps*beta / ((mu+eps)(mu+gamma))``, i.e. the disease-free
susceptible level is taken as 1. With ``include_tau=True`` the recruitment
dependent form ``eps*beta*tau / (mu(mu+eps)(mu+gamma))`` is used instead,
which adds ``tau`` to the parameter list.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

from .errors import InvalidArgumentError
from .model import ModifiedSeirParams

PARAMETERS = ("beta", "epsilon", "mu", "gamma")
ANALYTIC, FINITE_DIFFERENCE = "analytic", "finite-difference"
# Below about 1e-5 the rounding error of R0 dominates the truncation error.
DEFAULT_REL_STEP = 1e-5


@dataclass(frozen=True)
class SensitivityIndex:
    parameter: str
    value: float
    method: str


def reproduction_number(params: ModifiedSeirParams, include_tau: bool = False) -> float:
    p = params
    value = p.epsilon * p.beta / ((p.mu + p.epsilon) * (p.mu + p.gamma))
    if include_tau:
        value *= p.tau / p.mu
    return value


def parameter_names(include_tau: bool = False) -> tuple:
    return PARAMETERS + ("tau",) if include_tau else PARAMETERS


def _check_name(which: str, include_tau: bool) -> None:
    if which not in parameter_names(include_tau):
        raise InvalidArgumentError(
            f"unknown parameter {which!r}; expected one of {', '.join(parameter_names(include_tau))}"
        )


def sensitivity_analytic(params: ModifiedSeirParams, which: str, include_tau: bool = False) -> SensitivityIndex:
    _check_name(which, include_tau)
    p = params
    if which == "beta" or which == "tau":
        value = 1.0
    elif which == "epsilon":
        value = p.mu / (p.mu + p.epsilon)
    elif which == "gamma":
        value = -p.gamma / (p.mu + p.gamma)
    else:
        value = -p.mu * (2 * p.mu + p.epsilon + p.gamma) / ((p.mu + p.gamma) * (p.mu + p.epsilon))
        if include_tau:
            value -= 1.0
    return SensitivityIndex(which, value, ANALYTIC)


def sensitivity_fd(
    params: ModifiedSeirParams, which: str, rel_step: float = DEFAULT_REL_STEP, include_tau: bool = False
) -> SensitivityIndex:
    """Central difference of R0 with relative parameter step ``rel_step``."""
    _check_name(which, include_tau)
    if not 0 < rel_step <= 0.1:
        raise InvalidArgumentError(f"rel_step must lie in (0, 0.1], got {rel_step!r}")
    base = reproduction_number(params, include_tau)
    if base == 0:
        raise InvalidArgumentError("R0 is zero; the normalized index is undefined")
    value = getattr(params, which)
    hi, lo = value * (1 + rel_step), value * (1 - rel_step)
    up = reproduction_number(params.replace(**{which: hi}), include_tau)
    down = reproduction_number(params.replace(**{which: lo}), include_tau)
    # Divide by the realized step hi - lo, which absorbs the rounding of the
    # perturbed parameter values (nominally 2 * value * rel_step).
    derivative = (up - down) / (hi - lo)
    return SensitivityIndex(which, derivative * value / base, FINITE_DIFFERENCE)


def sensitivity_report(
    params: ModifiedSeirParams, rel_step: float = DEFAULT_REL_STEP, include_tau: bool = False
) -> List[SensitivityIndex]:
    """Analytic and finite-difference index for every parameter, analytic first."""
    out = []
    for name in parameter_names(include_tau):
        out.append(sensitivity_analytic(params, name, include_tau))
        out.append(sensitivity_fd(params, name, rel_step, include_tau))
    return out
