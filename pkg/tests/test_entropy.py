import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eklimit import Grid1D, StateFunctions
from eklimit import boundary_layer as bl
from eklimit import ek, entropy, euler
from eklimit.grid import integrate


def _random_flow(seed, n=64, state=None):
    rng = np.random.default_rng(seed)
    g = Grid1D(n_cells=n)
    k = np.arange(1, 4)
    rho = 1 + 0.5 * np.cos(np.pi * np.outer(g.x, k)) @ (rng.uniform(-1, 1, 3) / 3)
    J = np.sin(np.pi * np.outer(g.x, k)) @ rng.uniform(-1, 1, 3)
    state = state or StateFunctions(gamma=float(rng.uniform(1.2, 3)), alpha=float(rng.uniform(-1, 1)),
                                    c_alpha=0.5, epsilon=0.2)
    return ek.FlowState(rho, J, g, state), rng


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_functionals_nonnegative_and_expansions(seed):
    flow, rng = _random_flow(seed)
    x = flow.grid.x
    r = 1 + 0.3 * rng.uniform(-1, 1) * np.cos(np.pi * x)
    U = rng.uniform(-1, 1) * np.sin(np.pi * x)
    V = rng.uniform(-2, 2) * np.sin(np.pi * x)
    E = entropy.entropy_E(flow, r, U)
    Eh = entropy.entropy_Eh(flow, r, U, V)
    assert E >= 0 and Eh >= 0
    assert E == pytest.approx(entropy.entropy_E_expanded(flow, r, U), rel=1e-10, abs=1e-13)
    assert Eh == pytest.approx(entropy.entropy_Eh_expanded(flow, r, U, V), rel=1e-10, abs=1e-13)
    assert Eh - E == pytest.approx(entropy.eh_minus_e(flow, V), abs=1e-11 * max(E, Eh, 1.0))


def test_high_order_functional_vanishes_on_itself():
    flow, _ = _random_flow(3)
    assert entropy.entropy_Eh(flow, flow.rho, flow.u, flow.v) < 1e-28
    d = {k: v for k, v in entropy.distances(flow, _as_reference(flow)).items()}
    assert all(abs(v) < 1e-14 for v in d.values())


def _as_reference(flow):
    class Ref:
        rho = flow.rho
        u = flow.u
        v = flow.v
    return Ref


def test_lgamma_distance_of_sine_perturbation():
    g = Grid1D(n_cells=200)
    st_ = StateFunctions(gamma=2.0)
    flow = ek.FlowState(1 + 0.1 * np.sin(2 * np.pi * g.x), np.zeros(200), g, st_)

    class Ref:
        rho = np.ones(200)
        u = np.zeros(200)
        v = np.zeros(200)

    assert entropy.distances(flow, Ref)["dist_Lgamma"] == pytest.approx(0.1 / np.sqrt(2), rel=1e-10)


def test_pressure_defect_convex():
    s = StateFunctions(gamma=1.4)
    rho = np.linspace(0, 5, 101)
    assert np.all(entropy.pressure_defect(s, rho, 1.3) >= -1e-15)


def test_discrete_tolerance():
    assert entropy.discrete_tolerance(0.1, 0.2, 3.0, 10.0) == pytest.approx(10 * 0.05 * 3.0)


def _synthetic_report(shift=0.0):
    rep = entropy.EntropyReport(0.1, 64)
    t = np.linspace(0, 1, 41)
    E = 0.01 * np.exp(-t)
    for ti, ei in zip(t, E):
        rep.rows.append({"t": ti, "E": ei, "E_h": ei, "R": -ei + shift, "R_h": -ei + shift,
                         "R_h_direct": -ei, "E_h_E": 0.0, "vbl_energy": 0.0})
    return rep


def test_gronwall_check_accepts_and_rejects():
    ok = entropy.gronwall_check(_synthetic_report(), dx=1 / 64)
    assert ok["ok"] and ok["ok_h"]
    assert ok["C_fit"] == pytest.approx(1.0)
    bad = entropy.gronwall_check(_synthetic_report(shift=-1e-3), dx=1 / 64)
    assert not bad["ok"] and not bad["ok_h"]
    assert bad["min_margin"] == pytest.approx(-1e-3, rel=1e-3)


@pytest.fixture(scope="module")
def smooth_case():
    """Traveling-bump run with its reference and corrector at 41 samples up to t = 0.1."""
    eps, n = 0.1, 256
    state = StateFunctions.qhd(eps)
    grid = Grid1D(n_cells=n)
    fine = grid.refined(4)
    times = np.linspace(0, 0.1, 41)

    def data(x):
        return 1 + 0.2 * np.cos(np.pi * x), 0.3 * np.sin(np.pi * x)

    ref_run = euler.run_reference(state, fine, *data(fine.x), 0.1, times)
    rho0, u0 = data(grid.x)
    traj = ek.run(ek.EKConfig(state, grid, t_end=0.1), rho0, rho0 * u0, sample_times=times)
    delta = bl.layer_width(eps, bl.default_s(-1.0))
    rep = entropy.EntropyReport(eps, n)
    extra = []
    for f in traj.snapshots:
        snap = ref_run.at(f.t)
        ref = euler.EulerReference.from_snapshot(snap, state, grid)
        layer = bl.build_vbl(snap, state, 1.0, delta, grid)
        rep.add(f, ref, layer)
        extra.append(-eps**2 * integrate(f.rho * layer.v_bl * ref.u * ref.v_x, grid.dx))
    return rep, np.array(extra)


def test_high_order_rate_matches_direct_remainder(smooth_case):
    rep, _ = smooth_case
    t, Eh, Rd = rep.column("t"), rep.column("E_h"), rep.column("R_h_direct")
    dEdt = (Eh[2:] - Eh[:-2]) / (t[2:] - t[:-2])
    assert np.abs(dEdt - Rd[1:-1]).max() < 1e-2 * np.abs(Rd).max()


def test_first_order_rate_below_remainder(smooth_case):
    rep, _ = smooth_case
    t, E, R = rep.column("t"), rep.column("E"), rep.column("R")
    dEdt = (E[2:] - E[:-2]) / (t[2:] - t[:-2])
    assert np.all(dEdt <= R[1:-1] + 1e-2 * np.abs(R).max())


def test_transcribed_remainder_gap_is_the_convective_layer_term(smooth_case):
    rep, extra = smooth_case
    gap = rep.column("R_h") - rep.column("R_h_direct")
    np.testing.assert_allclose(gap[1:], extra[1:], rtol=2e-2, atol=1e-3 * np.abs(extra).max())


def test_layer_term_ten_vanishes(smooth_case):
    rep, _ = smooth_case
    assert np.all(np.abs(rep.column("R_bl_10")) < 1e-15)


def test_report_table_shape(smooth_case):
    rep, _ = smooth_case
    header, rows = rep.table()
    assert header == list(entropy.SERIES_FIELDS)
    assert len(rows) == 41 and len(rows[0]) == len(header)
