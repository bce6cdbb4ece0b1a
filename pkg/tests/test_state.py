import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from eklimit import DomainError, StateFunctions

ALPHAS = [-1, sp.Rational(-1, 2), 0, sp.Rational(1, 3), 1, sp.Rational(3, 2)]


def _symbolic(alpha, gamma=sp.Rational(5, 3), c=sp.Rational(1, 4)):
    r = sp.symbols("r", positive=True)
    k = c * r**alpha
    return r, {
        "dbeta": sp.sqrt(k),
        "dK": r * k,
        "dmu": sp.sqrt(r * k),
        "dtheta": sp.sqrt(k / r),
        "enthalpy": sp.diff(r**gamma / (gamma - 1), r),
        "d2_internal_energy": sp.diff(r**gamma / (gamma - 1), r, 2),
        "dpressure": sp.diff(r**gamma, r),
        "d2K": sp.diff(r * k, r),
        "d2mu": sp.diff(sp.sqrt(r * k), r),
        "capillarity_dk": sp.diff(k, r),
    }


@pytest.mark.parametrize("alpha", ALPHAS)
def test_derivatives_match_symbolic(alpha):
    s = StateFunctions(gamma=5 / 3, alpha=float(alpha), c_alpha=0.25, epsilon=0.1)
    r, exprs = _symbolic(alpha)
    pts = np.array([0.3, 0.9, 1.7, 4.0])
    for name, e in exprs.items():
        exact = np.array([float(e.subs(r, sp.Float(p, 30))) for p in pts])
        np.testing.assert_allclose(getattr(s, name)(pts), exact, rtol=1e-12, atol=1e-14, err_msg=name)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_antiderivatives_vanish_at_zero(alpha):
    s = StateFunctions(gamma=2.0, alpha=float(alpha), c_alpha=0.5)
    for name in ("beta", "K", "mu"):
        assert getattr(s, name)(0.0) == 0.0
    if alpha > -1:
        assert s.theta(0.0) == 0.0


def test_qhd_values():
    s = StateFunctions.qhd(0.1)
    assert s.alpha == -1 and s.c_alpha == 0.25
    # beta = sqrt(rho), K = rho / 4, mu = rho / 2 for k = 1 / (4 rho)
    rho = np.array([0.25, 1.0, 4.0])
    np.testing.assert_allclose(s.beta(rho), np.sqrt(rho), rtol=1e-15)
    np.testing.assert_allclose(s.K(rho), rho / 4, rtol=1e-15)
    np.testing.assert_allclose(s.mu(rho), rho / 2, rtol=1e-15)
    np.testing.assert_allclose(s.theta(rho), 0.5 * np.log(rho), rtol=1e-15)
    assert np.all(s.d2K(rho) == 0) and np.all(s.d2mu(rho) == 0)


@pytest.mark.parametrize("kw", [dict(gamma=1.0), dict(c_alpha=0.0), dict(alpha=-1.5), dict(epsilon=0.0)])
def test_rejects_bad_parameters(kw):
    with pytest.raises(ValueError):
        StateFunctions(**kw)


def test_domain_errors():
    s = StateFunctions(alpha=-0.5)
    with pytest.raises(DomainError):
        s.pressure(-1.0)
    with pytest.raises(DomainError):
        s.capillarity_k(0.0)
    with pytest.raises(DomainError):
        StateFunctions.qhd().theta(0.0)
    assert StateFunctions(alpha=0.5).capillarity_k(0.0) == 0.0


def test_scalar_in_scalar_out():
    s = StateFunctions()
    assert isinstance(s.pressure(2.0), float)
    assert s.pressure(np.ones(3)).shape == (3,)


@settings(max_examples=200, deadline=None)
@given(gamma=st.floats(1.05, 4.0), rho=st.floats(0.0, 50.0), r=st.floats(1e-3, 50.0))
def test_relative_energy_nonnegative(gamma, rho, r):
    s = StateFunctions(gamma=gamma)
    val = s.relative_internal_energy(rho, r)
    scale = s.internal_energy(max(rho, r)) + 1.0
    assert val >= -1e-12 * scale
    assert abs(s.relative_internal_energy(r, r)) <= 1e-12 * scale


def test_aux_velocity():
    s = StateFunctions(alpha=0.5, c_alpha=2.0)
    rho, g = np.array([0.5, 2.0]), np.array([1.0, -3.0])
    np.testing.assert_allclose(s.aux_velocity(rho, g), np.sqrt(2.0 * rho**0.5 / rho) * g)
