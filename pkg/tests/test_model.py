import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seirlab.errors import InvalidArgumentError, NumericalDomainError
from seirlab.model import (
    BackwardModelParams,
    ClassicalSeirParams,
    DynamicalSystem,
    ModifiedSeirParams,
    backward_model_jacobian,
    backward_model_rhs,
    backward_model_system,
    check_population_state,
    clamp_population,
    classical_seir_jacobian,
    classical_seir_rhs,
    linear_system,
    modified_seir_jacobian,
    modified_seir_rhs,
    modified_seir_system,
    numeric_jacobian,
    total_population,
)

from conftest import modified_params

BACKWARD = BackwardModelParams(0.3, 0.1, 0.2, 0.3, 0.1, 0.2, 0.3, 0.1)


@pytest.mark.parametrize("field", ["tau", "mu", "beta", "epsilon", "gamma"])
@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_modified_params_reject_nonpositive_or_nonfinite(field, bad):
    values = dict(tau=0.005, mu=0.005, beta=0.25, epsilon=0.06, gamma=0.07)
    values[field] = bad
    with pytest.raises(InvalidArgumentError):
        ModifiedSeirParams(**values)


def test_table_values():
    p = ModifiedSeirParams.table3()
    assert (p.tau, p.mu, p.beta, p.epsilon, p.gamma) == (0.005, 0.005, 0.25, 0.06, 0.07)
    assert ModifiedSeirParams.table3(tau=0.01).tau == 0.01
    c = ClassicalSeirParams.table5()
    assert (c.beta, c.epsilon, c.gamma, c.n) == (0.95, 0.5, 0.09, 1000.0)


def test_replace_returns_validated_copy(table3):
    assert table3.replace(beta=0.5).beta == 0.5
    with pytest.raises(InvalidArgumentError):
        table3.replace(beta=-0.5)


def test_modified_rhs_at_known_state(table3):
    rhs = modified_seir_rhs(table3, [0.9, 0.05, 0.04, 0.01])
    s, e, i, r = 0.9, 0.05, 0.04, 0.01
    expected = [
        0.005 - 0.25 * s * i - 0.005 * s,
        0.25 * s * i - 0.065 * e,
        0.06 * e - 0.075 * i,
        0.07 * i - 0.005 * r,
    ]
    np.testing.assert_allclose(rhs, expected, rtol=0, atol=1e-16)


@given(modified_params(), st.lists(st.floats(0, 10), min_size=4, max_size=4))
@settings(max_examples=60, deadline=None)
def test_modified_total_population_balance(p, state):
    # d(S+E+I+R)/dt = tau - mu N
    n = sum(state)
    assert np.sum(modified_seir_rhs(p, state)) == pytest.approx(p.tau - p.mu * n, abs=1e-12)


@given(modified_params(), st.lists(st.floats(0, 10), min_size=4, max_size=4))
@settings(max_examples=40, deadline=None)
def test_analytic_jacobians_match_central_differences(p, state):
    jac = modified_seir_jacobian(p, state)
    num = numeric_jacobian(modified_seir_system(p), state)
    np.testing.assert_allclose(jac, num, rtol=1e-6, atol=1e-6)


def test_classical_and_backward_jacobians():
    c = ClassicalSeirParams.table5()
    state = [500.0, 100.0, 200.0, 200.0]
    from seirlab.model import classical_seir_system

    np.testing.assert_allclose(
        classical_seir_jacobian(c, state), numeric_jacobian(classical_seir_system(c), state), atol=1e-6
    )
    x = [0.7, 0.1, 0.15, 0.05]
    np.testing.assert_allclose(
        backward_model_jacobian(BACKWARD, x), numeric_jacobian(backward_model_system(BACKWARD), x), atol=1e-8
    )


def test_classical_rhs_conserves_population():
    c = ClassicalSeirParams.table5()
    assert np.sum(classical_seir_rhs(c, [960, 10, 30, 0])) == pytest.approx(0, abs=1e-12)


def test_backward_rhs_disease_free_line_is_stationary():
    for s in (0.1, 1.0, 7.0):
        assert np.all(backward_model_rhs(BACKWARD, [s, 0, 0, 0]) == 0)


def test_wrong_dimension_rejected(table3):
    with pytest.raises(InvalidArgumentError):
        modified_seir_rhs(table3, [1, 2, 3])


def test_state_validation():
    with pytest.raises(InvalidArgumentError):
        check_population_state([1, -0.1, 0, 0], 4)
    with pytest.raises(InvalidArgumentError):
        check_population_state([1, float("nan"), 0, 0], 4)
    assert total_population([1, 2, 3, 4]) == 10


def test_clamp_small_undershoot_to_zero_and_reject_large():
    x = clamp_population(np.array([1000.0, -1e-7, 5.0, 0.0]))
    assert x[1] == 0.0
    with pytest.raises(NumericalDomainError):
        clamp_population(np.array([1000.0, -1.0, 5.0, 0.0]))


def test_dynamical_system_checks_output_length():
    bad = DynamicalSystem(2, lambda t, x: np.array([1.0]))
    with pytest.raises(InvalidArgumentError):
        bad(0.0, np.zeros(2))


def test_numeric_jacobian_linear_is_exact():
    a = np.array([[1.0, 2.0], [-3.0, 0.5]])
    np.testing.assert_allclose(numeric_jacobian(linear_system(a), [0.3, -2.0]), a, atol=1e-9)


def test_numeric_jacobian_rejects_nonfinite():
    sys_ = DynamicalSystem(1, lambda t, x: np.array([np.inf if x[0] < -0.5 else x[0]]))
    with pytest.raises(NumericalDomainError):
        numeric_jacobian(sys_, [-1.0])
