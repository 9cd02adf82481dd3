import numpy as np
import pytest
from hypothesis import given, settings

from seirlab.equilibria import r0
from seirlab.errors import InvalidArgumentError
from seirlab.sensitivity import (
    DEFAULT_REL_STEP,
    PARAMETERS,
    reproduction_number,
    sensitivity_analytic,
    sensitivity_fd,
    sensitivity_report,
)

from conftest import modified_params

TABLE3_INDICES = {"beta": 1.0, "epsilon": 0.076923, "mu": -0.143590, "gamma": -0.933333}


def test_table3_indices(table3):
    for name, expected in TABLE3_INDICES.items():
        fd = sensitivity_fd(table3, name).value
        assert sensitivity_analytic(table3, name).value == pytest.approx(fd, rel=1e-8)
        assert fd == pytest.approx(expected, abs=5e-7)


def test_beta_at_small_step(table3):
    assert sensitivity_fd(table3, "beta", rel_step=1e-6).value == pytest.approx(1.0, abs=1e-9)


def test_step_sweep_shows_second_order_then_rounding_floor(table3):
    for name in PARAMETERS:
        exact = sensitivity_analytic(table3, name).value
        steps = (1e-3, 1e-4, 1e-5, 1e-6)
        gaps = [abs(sensitivity_fd(table3, name, rel_step=h).value - exact) for h in steps]
        # beta enters R0 linearly: no truncation error at all
        if name != "beta":
            assert gaps[1] <= gaps[0] / 50
            assert gaps[2] < gaps[1]
        assert gaps[3] < 1e-9


@given(modified_params())
@settings(max_examples=200)
def test_analytic_matches_finite_difference(p):
    for name in PARAMETERS:
        a = sensitivity_analytic(p, name).value
        fd = sensitivity_fd(p, name).value
        assert abs(a - fd) <= 1e-8 * max(1.0, abs(fd))


@given(modified_params())
@settings(max_examples=100)
def test_indices_sum_to_zero(p):
    total = sum(sensitivity_analytic(p, n).value for n in PARAMETERS)
    assert abs(total) <= 1e-12


@given(modified_params())
@settings(max_examples=100)
def test_signs_and_ordering(p):
    s = {n: sensitivity_analytic(p, n).value for n in PARAMETERS}
    assert s["beta"] == 1 and 0 < s["epsilon"] < 1
    assert -1 < s["gamma"] < 0 and s["mu"] < 0
    assert abs(s["beta"]) >= max(abs(s["epsilon"]), abs(s["gamma"]))


@given(modified_params())
@settings(max_examples=50)
def test_rate_scaling_leaves_r0_unchanged(p):
    doubled = p.replace(mu=2 * p.mu, beta=2 * p.beta, epsilon=2 * p.epsilon, gamma=2 * p.gamma)
    assert reproduction_number(doubled) / reproduction_number(p) == pytest.approx(1.0, rel=1e-14)


def test_include_tau(table3):
    assert reproduction_number(table3, include_tau=True) == pytest.approx(r0(table3), rel=1e-15)
    p = table3.replace(tau=0.02)
    for name in PARAMETERS + ("tau",):
        a = sensitivity_analytic(p, name, include_tau=True).value
        fd = sensitivity_fd(p, name, include_tau=True).value
        assert a == pytest.approx(fd, rel=1e-8, abs=1e-10)
    assert sensitivity_analytic(p, "mu", include_tau=True).value == pytest.approx(
        sensitivity_analytic(p, "mu").value - 1.0
    )


def test_report_layout(table3):
    rep = sensitivity_report(table3)
    assert [r.parameter for r in rep] == [n for n in PARAMETERS for _ in range(2)]
    assert len(sensitivity_report(table3, include_tau=True)) == 10


def test_rejects_unknown_parameter_and_bad_step(table3):
    with pytest.raises(InvalidArgumentError):
        sensitivity_analytic(table3, "tau")
    with pytest.raises(InvalidArgumentError):
        sensitivity_fd(table3, "delta")
    for bad in (0.0, -1e-5, 0.5):
        with pytest.raises(InvalidArgumentError):
            sensitivity_fd(table3, "beta", rel_step=bad)
    assert 0 < DEFAULT_REL_STEP <= 0.1
