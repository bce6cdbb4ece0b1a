import numpy as np
import pytest
import sympy as sp

from eklimit import Grid1D, StateFunctions
from eklimit import ek

X = sp.symbols("x")


def _exact_capillary(state, rho_expr):
    """eps^2 d/dx (K(rho)_xx - K''(rho) rho_x^2 / 2 - beta(rho)_x^2), symbolically."""
    a = sp.nsimplify(state.alpha)
    c = sp.nsimplify(state.c_alpha)
    r = sp.symbols("r", positive=True)
    K = c / (2 + a) * r ** (2 + a)
    beta = 2 * sp.sqrt(c) / (2 + a) * r ** ((2 + a) / 2)
    Kpp = sp.diff(K, r, 2)
    rx = sp.diff(rho_expr, X)
    sigma = sp.diff(K.subs(r, rho_expr), X, 2) - Kpp.subs(r, rho_expr) * rx**2 / 2 \
        - sp.diff(beta.subs(r, rho_expr), X) ** 2
    return sp.lambdify(X, state.epsilon**2 * sp.diff(sigma, X), "numpy")


@pytest.mark.parametrize("alpha,c,amp,wave", [(-1.0, 0.25, 0.3, 1), (0.0, 1.0, 0.3, 1), (0.5, 0.7, 0.3, 1),
                                               (0.0, 1.0, 0.1, 2)])
def test_korteweg_tendency_against_symbolic(alpha, c, amp, wave):
    state = StateFunctions(gamma=2.0, alpha=alpha, c_alpha=c, epsilon=0.3)
    rho_expr = 1 + sp.nsimplify(amp) * sp.cos(wave * sp.pi * X)
    exact = _exact_capillary(state, rho_expr)
    errs = []
    for n in (64, 128, 256):
        g = Grid1D(n_cells=n)
        rho = 1 + amp * np.cos(wave * np.pi * g.x)
        f = ek.FlowState(rho, 0 * rho, g, state)
        errs.append(np.abs(ek.korteweg_rhs(f) - exact(g.x)).max())
        # the mu-form route agrees to the same order
        assert np.abs(ek.korteweg_rhs_mu_form(f) - exact(g.x)).max() < 50 * errs[-1] + 1e-8
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.8)


def test_rest_state_is_steady():
    st = StateFunctions.qhd(0.2)
    g = Grid1D(n_cells=32)
    f = ek.FlowState(np.full(32, 1.3), np.zeros(32), g, st)
    drho, dJ = ek.rhs(f)
    assert np.all(drho == 0) and np.all(dJ == 0)


def test_step_refuses_unstable_dt():
    st = StateFunctions.qhd(0.1)
    g = Grid1D(n_cells=64)
    rho = 1 + 0.2 * np.cos(np.pi * g.x)
    f = ek.FlowState(rho, 0 * rho, g, st)
    bound = ek.stability_bound(f)
    with pytest.raises(ek.StabilityError):
        ek.step(f, 1.01 * bound)
    f2 = ek.step(f, 0.5 * bound)
    assert f2.t == pytest.approx(0.5 * bound)
    assert f2.mass() == pytest.approx(f.mass(), rel=1e-14)


@pytest.mark.parametrize("reconstruction", ["linear", "minmod"])
def test_run_conserves_mass_and_keeps_symmetry(reconstruction):
    st = StateFunctions.qhd(0.1)
    g = Grid1D(n_cells=128)
    rho = 1 + 0.2 * np.cos(2 * np.pi * g.x)        # symmetric about x = 1/2
    J = 0.1 * np.sin(2 * np.pi * g.x)               # antisymmetric
    tr = ek.run(ek.EKConfig(st, g, t_end=0.1, reconstruction=reconstruction), rho, J, n_samples=5)
    assert not tr.aborted
    assert tr.mass_drift() < 1e-13
    f = tr.final
    np.testing.assert_allclose(f.rho, f.rho[::-1], atol=1e-12)
    np.testing.assert_allclose(f.J, -f.J[::-1], atol=1e-12)
    assert tr.energy_drift() < 1e-3


def test_energy_forms_agree():
    st = StateFunctions(alpha=0.5, c_alpha=0.8, epsilon=0.2)
    g = Grid1D(n_cells=64)
    rho = 1 + 0.3 * np.cos(np.pi * g.x)
    f = ek.FlowState(rho, 0.2 * np.sin(np.pi * g.x), g, st)
    assert ek.total_energy(f) == pytest.approx(ek.total_energy_k_form(f), rel=1e-3)


def test_sample_times_hit_exactly():
    st = StateFunctions.qhd(0.1)
    g = Grid1D(n_cells=32)
    rho = 1 + 0.1 * np.cos(np.pi * g.x)
    times = [0.0, 0.013, 0.05]
    tr = ek.run(ek.EKConfig(st, g, t_end=0.05), rho, 0 * rho, sample_times=times)
    assert tr.times == times
    with pytest.raises(ValueError):
        ek.run(ek.EKConfig(st, g, t_end=0.05), rho, 0 * rho, sample_times=[0.01, 0.02])


@pytest.mark.parametrize("kw", [dict(cfl=1.0), dict(t_end=0.0), dict(vacuum_floor=0.0),
                                dict(reconstruction="weno")])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        ek.EKConfig(StateFunctions.qhd(), Grid1D(n_cells=16), **kw)


def test_floor_counts_vacuum_cells():
    st = StateFunctions(alpha=0.0, c_alpha=1.0)
    g = Grid1D(n_cells=16)
    rho = np.ones(16)
    rho[3] = 0.0
    f = ek.FlowState(rho, np.zeros(16), g, st, floor=1e-8)
    assert f.floor_hits == 1 and f.rho.min() == 1e-8


def test_residual_rejects_nonvanishing_test_function():
    st = StateFunctions.qhd(0.1)
    g = Grid1D(n_cells=32)
    rho = 1 + 0.1 * np.cos(np.pi * g.x)
    tr = ek.run(ek.EKConfig(st, g, t_end=0.01), rho, 0 * rho, n_samples=2)
    with pytest.raises(ValueError):
        ek.m_equation_residual(tr, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x))
