import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seirlab.errors import DegenerateMeasurementError, InvalidArgumentError, NumericalDomainError
from seirlab.integrate import StepConfig, convergence_order, locate_peak, rk4_step, simulate
from seirlab.model import (
    TABLE6_INITIAL,
    ClassicalSeirParams,
    DynamicalSystem,
    classical_seir_system,
    linear_system,
)

DECAY = linear_system([[-1.0]])
GROWTH = linear_system([[1.0]])


def test_zero_field_leaves_state_unchanged():
    zero = DynamicalSystem(3, lambda t, x: np.zeros(3))
    x = np.array([1.0, -2.0, 3.5])
    np.testing.assert_array_equal(rk4_step(zero, 0.0, x, 0.3), x)


def test_growth_step_is_degree_four_taylor_polynomial():
    got = rk4_step(GROWTH, 0.0, [1.0], 0.1)[0]
    assert got == pytest.approx(1 + 0.1 + 0.1**2 / 2 + 0.1**3 / 6 + 0.1**4 / 24, abs=1e-15)


def test_decay_step_close_to_exponential():
    assert abs(rk4_step(DECAY, 0.0, [1.0], 0.1)[0] - math.exp(-0.1)) <= 1e-7


@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.floats(0.01, 2.0), st.floats(-5, 5))
@settings(max_examples=50, deadline=None)
def test_polynomial_in_t_up_to_cubic_integrated_exactly(coeffs, dt, t0):
    c0, c1, c2, c3 = coeffs
    field = DynamicalSystem(1, lambda t, x: np.array([c0 + c1 * t + c2 * t**2 + c3 * t**3]))

    def antiderivative(t):
        return c0 * t + c1 * t**2 / 2 + c2 * t**3 / 3 + c3 * t**4 / 4

    got = rk4_step(field, t0, [0.0], dt)[0]
    want = antiderivative(t0 + dt) - antiderivative(t0)
    assert got == pytest.approx(want, abs=1e-11 * (1 + abs(want)))


def test_nonfinite_stage_is_named():
    blowup = DynamicalSystem(1, lambda t, x: np.array([np.inf if t > 0 else 1.0]))
    with pytest.raises(NumericalDomainError, match="k2"):
        rk4_step(blowup, 0.0, [0.0], 0.1)


def test_nonpositive_dt_rejected():
    with pytest.raises(InvalidArgumentError):
        rk4_step(DECAY, 0.0, [1.0], 0.0)


def test_step_config_validation():
    for kwargs in ({"t_end": 1.0, "dt": 0.0}, {"t_end": 0.0}, {"t_end": 1.0, "dt": 2.0}, {"t_end": float("inf")}):
        with pytest.raises(InvalidArgumentError):
            StepConfig(**kwargs)


@pytest.mark.parametrize(
    "t_end,dt,expected", [(100.0, 0.1, 1000), (1.0, 0.3, 4), (0.7, 0.1, 7), (10.0, 0.001, 10000)]
)
def test_step_count_is_ceiling_without_padding_exact_multiples(t_end, dt, expected):
    cfg = StepConfig(t_end=t_end, dt=dt)
    assert cfg.n_steps == expected
    times = cfg.times()
    assert len(times) == expected + 1 and times[-1] == t_end


def test_final_step_shortened_to_hit_t_end():
    traj = simulate(DECAY, [1.0], StepConfig(t_end=1.0, dt=0.3))
    assert traj.times[-1] == 1.0
    assert traj.times[-1] - traj.times[-2] == pytest.approx(0.1)
    # RK4 on x' = -x multiplies by the quartic Taylor factor of exp(-h) per step.
    factor = 1.0
    for h in (0.3, 0.3, 0.3, 0.1):
        factor *= 1 - h + h**2 / 2 - h**3 / 6 + h**4 / 24
    assert traj.final[0] == pytest.approx(factor, abs=1e-15)


def test_simulate_errors_carry_step_and_time():
    boom = DynamicalSystem(1, lambda t, x: np.array([np.nan if t >= 0.25 else 0.0]))
    with pytest.raises(NumericalDomainError, match=r"step 3 \(t="):
        simulate(boom, [0.0], StepConfig(t_end=1.0, dt=0.1))


def test_convergence_order_decay():
    p = convergence_order(DECAY, [1.0], 1.0, 0.1)
    assert 3.7 <= p <= 4.3


def test_convergence_order_zero_field_is_degenerate():
    zero = DynamicalSystem(1, lambda t, x: np.zeros(1))
    with pytest.raises(DegenerateMeasurementError):
        convergence_order(zero, [1.0], 1.0, 0.1)


def test_halving_dt_error_ratio_in_order_four_band():
    exact = math.exp(-2.0)
    errs = [abs(simulate(DECAY, [1.0], StepConfig(t_end=2.0, dt=dt)).final[0] - exact) for dt in (0.2, 0.1)]
    assert 12 <= errs[0] / errs[1] <= 20


def test_seir_states_stay_nonnegative():
    traj = simulate(classical_seir_system(ClassicalSeirParams.table5()), TABLE6_INITIAL, StepConfig(t_end=100.0))
    assert np.all(traj.states >= 0)


def test_locate_peak_of_known_curve():
    # x' = (1, cos t): second component peaks at t = pi/2 with value 1.
    sys_ = DynamicalSystem(2, lambda t, x: np.array([1.0, math.cos(x[0])]))
    traj = simulate(sys_, [0.0, 0.0], StepConfig(t_end=3.0, dt=0.1))
    peak = locate_peak(sys_, traj, 1)
    assert peak.time == pytest.approx(math.pi / 2, abs=1e-3)
    assert peak.value == pytest.approx(1.0, abs=1e-6)


def test_locate_peak_at_boundary_is_degenerate():
    traj = simulate(DECAY, [1.0], StepConfig(t_end=1.0))
    with pytest.raises(DegenerateMeasurementError):
        locate_peak(DECAY, traj, 0)
