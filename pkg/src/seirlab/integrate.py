"""Fixed-step classical Runge-Kutta (RK4) integration."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeasurementError, InvalidArgumentError, NumericalDomainError, NumericalError
from .model import DynamicalSystem, as_state, check_population_state, clamp_population

DEFAULT_DT = 0.1


@dataclass(frozen=True)
class StepConfig:
    t_end: float
    dt: float = DEFAULT_DT
    t_start: float = 0.0

    def __post_init__(self):
        for name in ("t_end", "dt", "t_start"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"{name} must be finite")
        if not self.dt > 0:
            raise InvalidArgumentError(f"dt must be positive, got {self.dt!r}")
        if not self.t_end > self.t_start:
            raise InvalidArgumentError(f"t_end ({self.t_end}) must exceed t_start ({self.t_start})")
        if self.span / self.dt < 1.0 - 1e-12:
            raise InvalidArgumentError("(t_end - t_start) / dt must be at least 1")

    @property
    def span(self) -> float:
        return self.t_end - self.t_start

    @property
    def n_steps(self) -> int:
        # Tolerate the rounding in e.g. 100 / 0.1 so exact multiples are not padded.
        ratio = self.span / self.dt
        n = round(ratio)
        if abs(ratio - n) <= 1e-9 * max(1.0, ratio):
            return max(int(n), 1)
        return math.ceil(ratio)

    def times(self) -> np.ndarray:
        n = self.n_steps
        t = self.t_start + self.dt * np.arange(n + 1, dtype=float)
        t[-1] = self.t_end
        return t


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), dimension)

    def __len__(self):
        return len(self.times)

    def column(self, index: int) -> np.ndarray:
        return self.states[:, index]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def rk4_step(system: DynamicalSystem, t: float, state, dt: float) -> np.ndarray:
    """One classical four-stage RK4 update."""
    if not dt > 0:
        raise InvalidArgumentError(f"dt must be positive, got {dt!r}")
    x = np.asarray(state, dtype=float)
    half = 0.5 * dt

    def stage(name, tt, xx):
        k = system(tt, xx)
        if not np.all(np.isfinite(k)):
            raise NumericalDomainError(f"{system.name}: non-finite RK4 stage {name} at t={float(tt)!r}")
        return k

    k1 = stage("k1", t, x)
    k2 = stage("k2", t + half, x + half * k1)
    k3 = stage("k3", t + half, x + half * k2)
    k4 = stage("k4", t + dt, x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate(system: DynamicalSystem, initial, config: StepConfig) -> Trajectory:
    """Integrate from ``config.t_start`` to ``config.t_end``, recording every step.

    The last step is shortened when the span is not a multiple of ``dt`` so the
    trajectory ends exactly at ``t_end``. Population systems are clamped at
    zero after each step.
    """
    if system.nonnegative:
        x0 = check_population_state(initial, system.dimension)
    else:
        x0 = as_state(initial, system.dimension)
    times = config.times()
    states = np.empty((len(times), system.dimension))
    states[0] = x0
    x = x0
    for i in range(1, len(times)):
        t0, t1 = times[i - 1], times[i]
        try:
            x = rk4_step(system, t0, x, t1 - t0)
            if system.nonnegative:
                x = clamp_population(x, step=i)
        except NumericalError as exc:
            raise type(exc)(f"step {i} (t={float(t0)!r}): {exc}") from exc
        states[i] = x
    return Trajectory(times, states)


def convergence_order(system: DynamicalSystem, initial, t_end: float, dt0: float, t_start: float = 0.0) -> float:
    """Observed order of accuracy at ``t_end``.

    Errors at ``dt0``, ``dt0/2`` and ``dt0/4`` are measured in the max norm
    against the ``dt0/8`` solution; the result is the mean of the two
    successive ``log2`` error ratios.
    """
    finals = []
    for k in range(4):
        cfg = StepConfig(t_end=t_end, dt=dt0 / 2**k, t_start=t_start)
        finals.append(simulate(system, initial, cfg).final)
    reference = finals[-1]
    errors = [float(np.max(np.abs(f - reference))) for f in finals[:-1]]
    if min(errors) <= 0.0:
        raise DegenerateMeasurementError(f"error measurements are not all positive: {errors}")
    orders = [math.log2(errors[i] / errors[i + 1]) for i in range(2)]
    return 0.5 * (orders[0] + orders[1])


@dataclass(frozen=True)
class Peak:
    time: float
    value: float
    sample_index: int


def locate_peak(system: DynamicalSystem, trajectory: Trajectory, component: int) -> Peak:
    """Maximum of one component, refined between samples.

    The sampled maximum brackets a sign change of the component's derivative
    (taken from the vector field); its root is found by linear interpolation
    and the value there by cubic Hermite interpolation.
    """
    y = trajectory.column(component)
    k = int(np.argmax(y))
    if k == 0 or k == len(y) - 1:
        raise DegenerateMeasurementError(f"maximum of component {component} is at the end of the trajectory")
    t = trajectory.times

    def slope(i):
        return float(system(t[i], trajectory.states[i])[component])

    i = k - 1 if slope(k) <= 0 else k
    g0, g1 = slope(i), slope(i + 1)
    if not (g0 >= 0 >= g1) or g0 == g1:
        return Peak(float(t[k]), float(y[k]), k)
    h = t[i + 1] - t[i]
    s = g0 / (g0 - g1)
    h00, h10 = 2 * s**3 - 3 * s**2 + 1, s**3 - 2 * s**2 + s
    h01, h11 = -2 * s**3 + 3 * s**2, s**3 - s**2
    value = h00 * y[i] + h10 * h * g0 + h01 * y[i + 1] + h11 * h * g1
    return Peak(float(t[i] + s * h), float(value), k)
