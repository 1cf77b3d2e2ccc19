import math

import numpy as np
import pytest
from fractions import Fraction

from ardc.errors import DomainError, InvalidParameterError, OracleRefusal
from ardc.oracle import (airy_ref, airy_solution, legendre_ref, lngamma_ref, rk_reference)
from ardc.problem import (BuiltinProblem, CoefficientPair, CountingCoefficients,
                          InitialValueProblem, airy_coeffs, builtin_ivp, burst_coeffs, burst_m,
                          eval_coeffs_on_grid, legendre_coeffs)

AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)


# -- problem ------------------------------------------------------------------

def test_builtin_initial_data():
    ivp = builtin_ivp(BuiltinProblem.bremer237(10))
    assert (ivp.t0, ivp.t1, ivp.u0, ivp.du0) == (-1.0, 1.0, 0.0, 10.0)
    leg = builtin_ivp(BuiltinProblem.legendre(2))
    assert leg.u0 == pytest.approx(-0.5, rel=1e-14) and leg.du0 == 0.0
    airy = builtin_ivp(BuiltinProblem.airy())
    assert airy.u0 == pytest.approx(0.535561 + 0.103997j, abs=1e-6)
    assert (airy.t0, airy.t1) == (1.0, 1e8)


@pytest.mark.parametrize("p", [BuiltinProblem.bremer237(5), BuiltinProblem.bremer237(2e7),
                               BuiltinProblem.legendre(2.5), BuiltinProblem.legendre(0),
                               BuiltinProblem.burst(1.0), BuiltinProblem("nope")])
def test_builtin_rejects(p):
    with pytest.raises(InvalidParameterError):
        builtin_ivp(p)


@pytest.mark.parametrize("nu", [1, 2, 3, 7, 10, 11])
def test_legendre_origin_data_matches_recurrence(nu):
    ivp = builtin_ivp(BuiltinProblem.legendre(nu))
    p, dp = legendre_ref(nu, 0.0)
    assert ivp.u0.real == pytest.approx(p[0], abs=1e-14)
    assert ivp.du0.real == pytest.approx(dp[0], abs=1e-13)


def test_ivp_validation():
    c = CoefficientPair.constant(1.0)
    with pytest.raises(InvalidParameterError):
        InitialValueProblem(c, 1.0, 1.0, 1.0, 0.0, 0.1)
    with pytest.raises(InvalidParameterError):
        InitialValueProblem(c, 0.0, 1.0, 1.0, 0.0, 0.0)
    with pytest.raises(InvalidParameterError):
        InitialValueProblem(c, 0.0, 1.0, complex(math.nan), 0.0, 0.1)


def test_eval_examples():
    w, g = eval_coeffs_on_grid(airy_coeffs(), np.array([1.0, 4.0, 9.0]))
    np.testing.assert_array_equal(w, [1, 2, 3])
    np.testing.assert_array_equal(g, 0.0)
    assert burst_coeffs(math.sqrt(101)).omega(np.array(0.0)) == pytest.approx(10.0, rel=1e-15)
    assert burst_m(10.0) == pytest.approx(math.sqrt(101), rel=1e-15)
    w, g = eval_coeffs_on_grid(legendre_coeffs(1), np.array([0.0]))
    assert w[0] == pytest.approx(math.sqrt(2)) and g[0] == 0.0


def test_counting_rule():
    cc = CountingCoefficients(legendre_coeffs(5))
    eval_coeffs_on_grid(cc, np.linspace(0, 0.5, 7))
    assert cc.n_f == 14
    cc = CountingCoefficients(airy_coeffs())
    eval_coeffs_on_grid(cc, np.linspace(1, 2, 7))
    assert cc.n_f == 7


def test_domain_error():
    cc = CountingCoefficients(legendre_coeffs(5))
    with pytest.raises(DomainError):
        cc.omega(np.array([0.5, 1.0]))


def test_builtins_finite_inside_intervals():
    for p in (BuiltinProblem.airy(), BuiltinProblem.bremer237(1e3),
              BuiltinProblem.legendre(100), BuiltinProblem.burst(burst_m(1e3))):
        ivp = builtin_ivp(p)
        t = np.linspace(ivp.t0, ivp.t1, 1001)[1:-1]
        w, g = eval_coeffs_on_grid(ivp.coeffs, t)
        assert np.all(np.isfinite(w)) and np.all(np.isfinite(g))


# -- oracle -------------------------------------------------------------------

def test_airy_values():
    ai, bi, _, _ = airy_ref(1.0)
    assert ai == pytest.approx(0.535560883293, abs=1e-12)
    assert bi == pytest.approx(0.103997389496, abs=1e-12)
    assert airy_ref(0.0)[0] == pytest.approx(AI0, rel=1e-15)


@pytest.mark.parametrize("t", [0.0, 0.5, 3.0, 7.9, 8.5, 50.0, 1e3, 1e6])
def test_airy_wronskian(t):
    ai, bi, aip, bip = airy_ref(t)
    scale = max(1.0, t ** 0.5)
    assert ai * bip - aip * bi == pytest.approx(1.0 / math.pi, abs=1e-11 * scale)


@pytest.mark.parametrize("t", np.linspace(7.5, 8.5, 5))
def test_airy_branch_overlap(t):
    s = np.array(airy_ref(t, branch="series"))
    a = np.array(airy_ref(t, branch="asymptotic"))
    np.testing.assert_allclose(s, a, atol=1e-11)


def test_airy_refuses_out_of_range():
    with pytest.raises(OracleRefusal):
        airy_ref(2e8)


def test_airy_against_rk():
    u0, du0 = airy_solution(1.0)
    ivp = InitialValueProblem(airy_coeffs(), 1.0, 50.0, u0[0], du0[0], h_init=0.1)
    ref = rk_reference(ivp, abs_tol=1e-14, rel_tol=3e-14)
    u, _ = airy_solution(50.0)
    assert abs(ref.u[0] - u[0]) / abs(u[0]) <= 1e-10


def test_legendre_values():
    p, dp = legendre_ref(2, 0.0)
    assert p[0] == -0.5 and dp[0] == 0.0
    # exact rational recurrence for P_10(1/2)
    x = Fraction(1, 2)
    a, b = Fraction(1), x
    for k in range(1, 10):
        a, b = b, ((2 * k + 1) * x * b - k * a) / (k + 1)
    p, _ = legendre_ref(10, 0.5)
    assert p[0] == pytest.approx(float(b), rel=1e-14)
    assert p[0] == pytest.approx(-0.18822860, abs=1e-8)


def test_legendre_refusals():
    with pytest.raises(OracleRefusal):
        legendre_ref(10 ** 7, 0.1)
    with pytest.raises(OracleRefusal):
        legendre_ref(10, 0.95)
    with pytest.raises(DomainError):
        legendre_ref(2.5, 0.1)


def test_lngamma():
    assert lngamma_ref(1.0) == pytest.approx(0.0, abs=1e-14)
    assert lngamma_ref(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-13)
    assert lngamma_ref(11.0) == pytest.approx(math.log(3628800.0), rel=1e-13)
    for x in (0.1, 2.7, 33.3, 1e5):
        assert lngamma_ref(x) == pytest.approx(math.lgamma(x), rel=1e-13, abs=1e-13)
    with pytest.raises(DomainError):
        lngamma_ref(0.0)


def test_rk_harmonic():
    ivp = InitialValueProblem(CoefficientPair.constant(1.0), 0.0, 2 * math.pi, 1.0, 0.0, 0.1)
    ref = rk_reference(ivp)
    assert abs(ref.u[0] - 1.0) <= 1e-11
    assert ref.cost > 0 and ref.est_err[0] >= 0


def test_rk_budget_refusal():
    with pytest.raises(OracleRefusal):
        rk_reference(builtin_ivp(BuiltinProblem.bremer237(1e7)), budget=1e6)


def test_rk_order():
    # error against work: err ~ cost^-p for an order-p method
    ivp = InitialValueProblem(burst_coeffs(burst_m(30.0)), 0.0, 2.0, 1.0, 0.0, 0.1)
    exact = rk_reference(ivp, abs_tol=1e-15, rel_tol=3e-14).u[0]
    r1 = rk_reference(ivp, abs_tol=1e-6, rel_tol=1e-6)
    r2 = rk_reference(ivp, abs_tol=1e-10, rel_tol=1e-10)
    e1, e2 = abs(r1.u[0] - exact), abs(r2.u[0] - exact)
    order = math.log(e1 / e2) / math.log(r2.cost / r1.cost)
    assert order >= 7.0
