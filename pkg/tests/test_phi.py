import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from orliczlab import (INF, Ball, Coefficient, Custom, DomainError, DoublePhase, GrowthField,
                       NoConvergence, Power, PowerLog, PsiR, UnsupportedOperation,
                       VariableExponent, generalized_inverse, psi_r, psi_sandwich_constants,
                       sobolev_conjugate_inverse)
from orliczlab.phi import log_grid

DP = DoublePhase(1.1, 2.0, Coefficient.degenerate(0.5))
DP_MAX = DoublePhase(1.1, 2.0, Coefficient.degenerate(0.5), form="max")

FAMILIES = {
    "power": Power(2.5),
    "double_phase": DP,
    "double_phase_max": DP_MAX,
    "variable": VariableExponent(lambda x: 2.0 + 0.5 * np.sin(x), declared_exponents=(1.5, 2.5)),
    "powerlog": PowerLog(2.0, declared_exponents=(2.0, 3.0)),
}


# evaluation ---------------------------------------------------------------


def test_double_phase_value_at_minus_one():
    assert DP(-1.0, 1.0) == pytest.approx(2.0, rel=1e-15)


def test_power_value():
    assert Power(2)(None, 3.0) == 9.0


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_value_at_zero_is_zero(name):
    assert FAMILIES[name](np.array([-1.0, 0.0, 0.7]), 0.0).tolist() == [0.0, 0.0, 0.0]


def test_negative_t_rejected():
    with pytest.raises(DomainError):
        Power(2)(None, -1.0)


def test_double_phase_sum_form_matches_definition():
    x = np.linspace(-2, 2, 41)
    t = 1.7
    expected = t ** 1.1 + np.maximum(-x, 0) ** 0.5 * t ** 2
    np.testing.assert_allclose(DP(x, t), expected, rtol=1e-15)


def test_max_form_integrates_its_derivative():
    for x in (-1.0, -0.3, 0.5):
        for t in (0.2, 1.0, 7.0):
            ref = integrate.quad(lambda s: DP_MAX.derivative(x, s), 0, t, epsrel=1e-13,
                                 points=[float(DP_MAX.crossover(x))] if x < 0 else None)[0]
            assert DP_MAX(x, t) == pytest.approx(ref, rel=1e-10)


# derivative ----------------------------------------------------------------


def test_max_form_derivative_at_one():
    assert DP_MAX.derivative(-1.0, 1.0) == 1.0


def test_power_derivative():
    assert Power(2).derivative(None, 3.0) == 6.0


def test_max_form_derivative_picks_q_branch():
    # 2^0.1 ~ 1.072 against a(-1) * 2 = 2
    assert DP_MAX.derivative(-1.0, 2.0) == pytest.approx(max(2 ** 0.1, 2.0))


def test_derivative_requires_positive_t():
    with pytest.raises(DomainError):
        Power(2).derivative(None, 0.0)


def test_custom_without_derivative_is_unsupported():
    with pytest.raises(UnsupportedOperation):
        Custom(lambda x, t: t ** 2).derivative(0.0, 1.0)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_derivative_matches_finite_difference(name):
    phi = FAMILIES[name]
    x, t, h = -0.4, 1.3, 1e-6
    fd = (phi(x, t + h) - phi(x, t - h)) / (2 * h)
    assert phi.derivative(x, t) == pytest.approx(fd, rel=1e-7)


# inverse -------------------------------------------------------------------


def test_power_inverse():
    assert Power(2).inverse(None, 9.0) == pytest.approx(3.0, rel=1e-15)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_inverse_of_zero(name):
    assert FAMILIES[name].inverse(-0.5, 0.0) == 0.0


def test_inverse_where_coefficient_vanishes():
    # bisection result against the closed-form power inverse
    assert DP.inverse(0.0, 32.0) == pytest.approx(32.0 ** (1 / 1.1), rel=1e-11)


def test_inverse_is_left_continuous_on_plateau():
    phi = Custom(lambda x, t: np.minimum(t, 1.0) + np.maximum(t - 2.0, 0.0))
    # phi = 1 on [1, 2]; the smallest preimage of 1 is 1
    assert phi.inverse(0.0, 1.0) == pytest.approx(1.0, rel=1e-11)


def test_inverse_bracket_failure_reports():
    bounded = Custom(lambda x, t: 1.0 - np.exp(-t))
    with pytest.raises(NoConvergence) as info:
        bounded.inverse(0.0, 2.0)
    assert info.value.partial is not None


def test_generalized_inverse_vectorized():
    y = np.array([0.0, 1e-6, 1.0, 1e6])
    out = generalized_inverse(lambda t: t ** 3, y)
    np.testing.assert_allclose(out, np.cbrt(y), rtol=1e-11)


@pytest.mark.parametrize("name", sorted(FAMILIES))
@settings(max_examples=40, deadline=None)
@given(x=st.floats(-1, 1), logy=st.floats(-6, 6))
def test_inverse_consistency(name, x, logy):
    phi = FAMILIES[name]
    y = 10.0 ** logy
    assert phi(x, phi.inverse(x, y)) == pytest.approx(y, rel=1e-10)


def test_max_form_inverse_closed_form_round_trip():
    x = np.linspace(-1, 1, 21)[:, None]
    y = np.geomspace(1e-6, 1e6, 25)[None, :]
    np.testing.assert_allclose(DP_MAX(x, DP_MAX.inverse(x, y)), np.broadcast_to(y, (21, 25)),
                               rtol=1e-12)


# conjugate -----------------------------------------------------------------


def test_quadratic_half_is_self_conjugate():
    assert Power(2, 0.5).conjugate(None, 4.0) == pytest.approx(8.0, rel=1e-14)


def test_legendre_pair_cubic():
    assert Power(3, 1 / 3).conjugate(None, 1.0) == pytest.approx(2 / 3, rel=1e-14)


@pytest.mark.parametrize("x", [-1.0, -0.25, 0.5])
def test_double_phase_conjugate_matches_dense_scan(x):
    s = np.geomspace(1e-8, 1e8, 10 ** 6)
    brute = np.max(1.0 * s - DP(x, s))
    assert DP.conjugate(x, 1.0) == pytest.approx(max(brute, 0.0), rel=1e-6)


def test_generic_conjugate_matches_closed_form():
    generic = Custom(lambda x, t: t ** 3 / 3, declared_exponents=(3, 3))
    t = np.array([0.0, 0.1, 1.0, 5.0, 300.0])
    np.testing.assert_allclose(generic.conjugate(0.0, t), 2 / 3 * t ** 1.5, rtol=1e-9)


def test_conjugate_of_linear_growth_unsupported():
    with pytest.raises(UnsupportedOperation):
        Power(1.0).conjugate(None, 2.0)


def test_conjugate_rejects_negative_t():
    with pytest.raises(DomainError):
        Power(2).conjugate(None, -1.0)


@pytest.mark.parametrize("name", sorted(FAMILIES))
@settings(max_examples=30, deadline=None)
@given(x=st.floats(-1, 1), ls=st.floats(-3, 3), lt=st.floats(-3, 3))
def test_young_inequality(name, x, ls, lt):
    phi = FAMILIES[name]
    s, t = 10.0 ** ls, 10.0 ** lt
    assert s * t <= (phi(x, s) + phi.conjugate(x, t)) * (1 + 1e-6)


@pytest.mark.parametrize("name", sorted(FAMILIES))
@settings(max_examples=30, deadline=None)
@given(x=st.floats(-1, 1), lt=st.floats(-3, 3))
def test_conjugate_bound(name, x, lt):
    phi = FAMILIES[name]
    t = 10.0 ** lt
    value = phi(x, t)
    assert phi.conjugate(x, value / t) <= value * (1 + 1e-6)


@pytest.mark.parametrize("name", ["power", "double_phase", "double_phase_max"])
def test_inverse_pair_is_comparable_to_identity(name):
    # phi^-1(t) * (phi*)^-1(t) lies in [t, 2t] for convex phi
    phi = FAMILIES[name]
    conj = phi.conjugate_function()
    t = np.geomspace(1e-3, 1e3, 13)
    for x in (-1.0, -0.1, 0.5):
        prod = np.asarray(phi.inverse(x, t)) * np.asarray(conj.inverse(x, t))
        assert np.all(prod >= t * (1 - 1e-6))
        assert np.all(prod <= 2 * t * (1 + 1e-6))


# monotonicity --------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_monotone_in_t(name):
    phi = FAMILIES[name]
    t = np.concatenate([[0.0], log_grid(1e-6, 1e6, 32)])
    vals = np.asarray(phi(np.linspace(-1, 1, 9)[:, None], t[None, :]))
    assert np.all(np.diff(vals, axis=1) >= 0)


def test_declared_exponents_must_be_ordered():
    with pytest.raises(DomainError):
        Custom(lambda x, t: t, declared_exponents=(3.0, 2.0))
    with pytest.raises(DomainError):
        DoublePhase(2.0, 1.5, 1.0)


# coefficients and growth fields ---------------------------------------------


def test_coefficient_nonnegative_and_holder():
    a = Coefficient.degenerate(0.5)
    xs = np.linspace(-1, 1, 201)
    assert np.all(a(xs) >= 0)
    assert a.holder_ratio(xs) <= a.holder_constant * (1 + 1e-12)


def test_coefficient_rejects_negative_constant():
    with pytest.raises(DomainError):
        Coefficient.constant(-1.0)


@pytest.mark.parametrize("phi", [DP, DP_MAX, Power(2.5)])
def test_canonical_field_growth_bounds(phi):
    field = GrowthField.canonical(phi)
    x = np.linspace(-1, 1, 41)[:, None]
    xi = np.concatenate([-np.geomspace(1e-4, 1e4, 30), np.geomspace(1e-4, 1e4, 30)])[None, :]
    assert field.bound_violation(x, xi) <= 1e-12


def test_growth_field_constants_ordered():
    with pytest.raises(DomainError):
        GrowthField(Power(2), 2.0, 1.0)


# balls -----------------------------------------------------------------------


def test_ball_measure():
    assert Ball(0.3, 0.25).measure == pytest.approx(0.5)
    assert Ball((0, 0, 0), 1.0, dim=3).measure == pytest.approx(4 / 3 * math.pi)


def test_ball_samples_include_ends_and_center():
    xs = Ball(-0.5, 0.25).samples(64)
    assert xs[0] == -0.75 and xs[-1] == -0.25
    assert np.any(np.isclose(xs, -0.5, atol=0))


def test_ball_rejects_bad_radius():
    with pytest.raises(DomainError):
        Ball(0.0, 0.0)


# psi_r -----------------------------------------------------------------------


def test_psi_on_ball_without_degeneracy():
    assert psi_r(DP, Ball(0.5, 0.4), 2.0) == pytest.approx(2 ** 1.1 / 1.1, rel=1e-9)


def test_psi_power_two():
    assert psi_r(Power(2), Ball(0.0, 1.0), 1.0) == pytest.approx(0.5, rel=1e-9)


def test_psi_double_phase_closed_form_and_sandwich():
    # phi^-(s)/s^p = 1 + a_min s^(q-p) is increasing, so
    # psi(t) = t^p/p + a_min t^q/q with a_min = 0.25^0.5 on (-0.75, -0.25)
    ball = Ball(-0.5, 0.25)
    value = psi_r(DP, ball, 10.0)
    assert value == pytest.approx(10 ** 1.1 / 1.1 + 0.5 * 100 / 2, rel=1e-6)
    c1, c2 = psi_sandwich_constants(1.1, 2.0)
    phi_minus = DP.lower_envelope(ball.samples())(np.array([10.0]))[0]
    assert c1 * phi_minus <= value <= c2 * phi_minus


def test_psi_running_sup_against_quadrature_oracle():
    # phi/t^p oscillates, so the running supremum matters
    phi = Custom(lambda x, t: t ** 2 * (2 + np.sin(3 * np.log(t))), x_dependent=False)
    psi = PsiR(phi, Ball(0.0, 1.0), p=2.0, t_range=(1e-3, 1e3))
    dense = log_grid(1e-3, 10.0, 5120)
    ratio = np.maximum.accumulate(np.asarray(phi(0.0, dense)) / dense ** 2)

    def integrand(tau):
        return tau * np.interp(tau, dense, ratio)

    head = ratio[0] * dense[0] ** 2 / 2
    ref = head + integrate.quad(integrand, dense[0], 10.0, limit=2000, epsrel=1e-10)[0]
    assert psi(10.0) == pytest.approx(ref, rel=1e-5)


def test_psi_convex_increasing_and_inc_p():
    psi = PsiR(DP, Ball(-0.3, 0.2))
    t = log_grid(1e-4, 1e4, 16)
    v = np.asarray(psi(t))
    assert np.all(np.diff(v) > 0)
    assert np.all(np.diff(v / t ** 1.1) >= -1e-12 * (v / t ** 1.1)[1:])
    a, b = t[:-1], t[1:]
    mid = np.asarray(psi(0.5 * (a + b)))
    assert np.all(mid <= 0.5 * (v[:-1] + v[1:]) * (1 + 1e-12))


def test_psi_extends_range_on_demand():
    psi = PsiR(Power(2), Ball(0.0, 1.0), t_range=(1e-3, 1e3))
    assert psi(1e5) == pytest.approx(0.5e10, rel=1e-9)


def test_psi_requires_exponent():
    with pytest.raises(DomainError):
        PsiR(Custom(lambda x, t: t ** 2), Ball(0.0, 1.0))


# Sobolev conjugate -----------------------------------------------------------


def test_sobolev_conjugate_inverse_power():
    assert sobolev_conjugate_inverse(Power(2), 64.0, 3) == pytest.approx(2.0, rel=1e-14)


def test_sobolev_conjugate_inverse_at_one():
    assert sobolev_conjugate_inverse(Power(1.5), 1.0, 2) == pytest.approx(1.0)


def test_sobolev_conjugate_inverse_critical_exponent_is_flat():
    t = np.geomspace(1.0, 1e6, 7)
    np.testing.assert_allclose(sobolev_conjugate_inverse(Power(3), t, 3), 1.0, rtol=1e-12)


def test_sobolev_conjugate_rejects_large_exponent_and_bad_t():
    with pytest.raises(DomainError):
        sobolev_conjugate_inverse(Power(4), 2.0, 3)
    with pytest.raises(DomainError):
        sobolev_conjugate_inverse(Power(2), 0.0, 3)


def test_inf_is_extended_value():
    assert INF > 1e308 and float(INF) == math.inf and str(INF) == "inf"
