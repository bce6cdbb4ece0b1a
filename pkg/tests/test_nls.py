import numpy as np
import pytest

from eklimit import nls

N = 64
X = (np.arange(N) + 0.5) / N


def test_cosine_derivatives_are_exact_on_modes():
    f = np.cos(2 * np.pi * X) + 0.3 * np.cos(5 * np.pi * X)
    np.testing.assert_allclose(nls.derivative(f), -2 * np.pi * np.sin(2 * np.pi * X)
                               - 1.5 * np.pi * np.sin(5 * np.pi * X), atol=1e-11)
    np.testing.assert_allclose(nls.second_derivative(f), -(2 * np.pi) ** 2 * np.cos(2 * np.pi * X)
                               - 0.3 * (5 * np.pi) ** 2 * np.cos(5 * np.pi * X), atol=1e-9)
    g = np.sin(3 * np.pi * X)
    np.testing.assert_allclose(nls.sine_derivative(g), 3 * np.pi * np.cos(3 * np.pi * X), atol=1e-11)
    xs = np.array([0.0, 0.123, 1.0])
    np.testing.assert_allclose(nls.evaluate(f, xs), np.cos(2 * np.pi * xs) + 0.3 * np.cos(5 * np.pi * xs),
                               atol=1e-12)


def test_odd_mode_content_vanishes_for_cell_data():
    # any cell-center data is represented by its even extension, so the sine part is structural zero
    rng = np.random.default_rng(1)
    psi = rng.normal(size=N) + 1j * rng.normal(size=N)
    assert nls.odd_mode_content(psi) < 1e-14
    assert nls.odd_mode_content(np.sin(np.pi * X).astype(complex)) < 1e-14


def test_phase_from_velocity():
    S = nls.phase_from_velocity(np.sin(np.pi * X), N)
    np.testing.assert_allclose(S, (1 - np.cos(np.pi * X)) / np.pi, atol=1e-12)


def test_madelung_round_trip():
    rho = 1 + 0.3 * np.cos(np.pi * X)
    u = 0.2 * np.sin(np.pi * X)
    w = nls.wave_from_hydro(rho, u, 0.5)
    r, J = nls.madelung(w)
    np.testing.assert_allclose(r, rho, atol=1e-14)
    np.testing.assert_allclose(J, rho * u, atol=1e-10)
    assert nls.continuity_residual(w) < 1e-10


def test_constant_state_rotates_in_phase():
    a, eps, g = 0.8, 0.3, 2.0
    w = nls.WaveState(np.full(N, a, dtype=complex), eps, g)
    out = nls.run(w, 0.5, 1e-3)
    exact = a * np.exp(-1j * 0.5 * g / (g - 1) * a ** (2 * (g - 1)) / eps)
    np.testing.assert_allclose(out.states[-1].psi, exact, atol=1e-12)


def test_single_mode_linear_dispersion():
    # in the small-amplitude limit a cosine mode oscillates with frequency eps (pi k)^2 / 2
    eps, k, t = 0.5, 3, 0.2
    amp = 1e-6
    w = nls.WaveState(amp * np.cos(k * np.pi * X).astype(complex), eps, 2.0)
    out = nls.run(w, t, 1e-3, vacuum_floor=1e-300)
    exact = amp * np.cos(k * np.pi * X) * np.exp(-0.5j * eps * (np.pi * k) ** 2 * t)
    np.testing.assert_allclose(out.states[-1].psi, exact, atol=1e-15)


def test_run_conserves_mass_and_energy():
    w = nls.wave_from_hydro(1 + 0.2 * np.cos(np.pi * X), 0.3 * np.sin(np.pi * X), 0.5)
    out = nls.run(w, 0.1, 2e-4, [0.0, 0.05, 0.1])
    assert out.times == [0.0, 0.05, 0.1]
    assert out.mass_drift() < 1e-13
    assert out.energy_drift() < 1e-6
    assert nls.odd_mode_content(out.states[-1].psi) < 1e-12


def test_strang_second_order():
    w = nls.wave_from_hydro(1 + 0.2 * np.cos(np.pi * X), 0.3 * np.sin(np.pi * X), 0.5)
    ref = nls.run(w, 0.1, 1e-5).states[-1].psi
    errs = [np.abs(nls.run(w, 0.1, dt).states[-1].psi - ref).max() for dt in (4e-3, 2e-3)]
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.15)


def test_vacuum_stops_run():
    w = nls.WaveState(np.cos(np.pi * X).astype(complex), 0.5, 2.0)
    out = nls.run(w, 0.1, 1e-3, [0.05, 0.1], vacuum_floor=0.05)
    assert out.vacuum and out.times == [0.0]
