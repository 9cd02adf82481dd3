import numpy as np
import pytest
from hypothesis import given, settings

from seirlab.equilibria import endemic_equilibrium, r0
from seirlab.errors import InvalidArgumentError, PreconditionError
from seirlab.model import modified_seir_jacobian
from seirlab.polynomial import characteristic_polynomial, polynomial_roots
from seirlab.stability import (
    Verdict,
    classify_stability,
    dfe_quadratic_coefficients,
    dfe_stability_report,
    ee_cubic_coefficients,
    ee_stability_report,
    lyapunov_derivative,
    lyapunov_dfe_certificate,
    sample_shifted_region,
    shifted_rhs,
)
from seirlab.model import modified_seir_rhs

from conftest import modified_params


def test_classify_examples():
    assert classify_stability([-1, -2]) is Verdict.STABLE
    assert classify_stability([-1, 0.5]) is Verdict.UNSTABLE
    assert classify_stability([-1, 1e-12], tol=1e-9) is Verdict.NONHYPERBOLIC
    assert classify_stability([complex(-1, 3), complex(-1, -3)]) is Verdict.STABLE
    with pytest.raises(InvalidArgumentError):
        classify_stability([])
    with pytest.raises(InvalidArgumentError):
        classify_stability([-1], tol=0)


def test_dfe_polynomial_factors(table3):
    poly = characteristic_polynomial(modified_seir_jacobian(table3, [1, 0, 0, 0]))
    a1, a2 = dfe_quadratic_coefficients(table3)
    mu = table3.mu
    expected = np.polymul(np.polymul([1, mu], [1, mu]), [1, a1, a2])
    np.testing.assert_allclose(poly.coefficients, expected, atol=1e-15)
    assert a1 == pytest.approx(2 * 0.005 + 0.06 + 0.07)
    assert a2 == pytest.approx(0.065 * 0.075 * (1 - r0(table3)))


def test_quadratic_factor_roots_real_and_one_positive(table3):
    a1, a2 = dfe_quadratic_coefficients(table3)
    roots = polynomial_roots([1, a1, a2])
    assert np.all(roots.imag == 0)
    assert np.sum(roots.real > 0) == 1


def test_table3_dfe_unstable_with_one_positive_eigenvalue(table3):
    rep = dfe_stability_report(table3)
    assert rep.verdict is Verdict.UNSTABLE
    assert np.sum(rep.eigenvalues.real > 0) == 1
    assert not rep.criteria["descartes_no_positive_root"]
    assert rep.criteria["double_eigenvalue_minus_mu"]


def test_dfe_stable_at_half_threshold(table3):
    p = table3.replace(beta=table3.beta * 0.5 / r0(table3))
    assert r0(p) == pytest.approx(0.5)
    rep = dfe_stability_report(p)
    assert rep.verdict is Verdict.STABLE
    assert rep.criteria["descartes_no_positive_root"] and rep.criteria["quadratic_coefficients_positive"]


def test_table3_ee_stable(table3):
    rep = ee_stability_report(table3)
    assert rep.verdict is Verdict.STABLE
    assert rep.criteria["routh_hurwitz"] and rep.criteria["agrees_with_eigenvalues"]
    assert np.all(rep.eigenvalues.real < 0)


def test_ee_requires_r0_above_one(table3):
    with pytest.raises(PreconditionError):
        ee_stability_report(table3.replace(beta=0.01))


@given(modified_params())
@settings(max_examples=60)
def test_ee_closed_form_coefficients_match_deflation(p):
    if endemic_equilibrium(p) is None:
        return
    rep = ee_stability_report(p)
    c = rep.coefficients
    for key in "ABC":
        assert c[key] == pytest.approx(c[f"{key}_closed_form"], rel=1e-9, abs=1e-14)
    assert abs(c["deflation_remainder"]) <= 1e-14
    assert rep.criteria["agrees_with_eigenvalues"]


@given(modified_params())
@settings(max_examples=60)
def test_dfe_eigenvalues_match_lapack(p):
    rep = dfe_stability_report(p)
    ref = np.linalg.eigvals(modified_seir_jacobian(p, rep.equilibrium.state))
    got = sorted(rep.eigenvalues, key=lambda z: (z.real, z.imag))
    ref = sorted(ref, key=lambda z: (z.real, z.imag))
    np.testing.assert_allclose(got, ref, atol=1e-12)


@given(modified_params())
@settings(max_examples=50)
def test_shifted_field_is_translated_original(p):
    rng = np.random.default_rng(0)
    x = rng.uniform(0, 1, 4)
    original = modified_seir_rhs(p, x + np.array([p.tau / p.mu, 0, 0, 0]))
    np.testing.assert_allclose(shifted_rhs(p, x), original, rtol=1e-12, atol=1e-14)


def test_lyapunov_identity_pointwise(table3):
    x = np.array([0.2, 0.1, 0.3, 0.4])
    assert lyapunov_derivative(table3, x) == pytest.approx(-table3.mu * x.sum(), abs=1e-16)


def test_sampling_is_seeded_and_inside_region():
    a = sample_shifted_region(500, 2.0, seed=5)
    b = sample_shifted_region(500, 2.0, seed=5)
    np.testing.assert_array_equal(a, b)
    assert np.all(a >= 0) and np.all(np.linalg.norm(a, axis=1) <= 2.0 + 1e-12)


def test_certificate_fields(table3):
    cert = lyapunov_dfe_certificate(table3, samples=1000, seed=3)
    assert cert.verdict and cert.sample_count == 1000 and cert.seed == 3
    assert cert.max_V_violation < 0 and cert.max_dVdt <= 0
    with pytest.raises(InvalidArgumentError):
        lyapunov_dfe_certificate(table3, samples=0)
