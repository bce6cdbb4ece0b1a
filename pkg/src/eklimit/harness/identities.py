"""
Randomized identity suite for the state maps and entropy functionals.

Each draw picks random admissible parameters and smooth fields with
closed-form gradients.  Gradients are installed directly on the FlowState,
so algebraic identities close to round-off.  The auxiliary momentum is
installed from the capillarity coefficient, m = rho sqrt(k/rho) rho_x,
rather than from beta, so the functionals and the gap formula reach the
capillary energy by different routes.
"""

import numpy as np
from scipy.integrate import quad

from .. import entropy
from ..ek import FlowState, total_energy, total_energy_k_form
from ..grid import Grid1D
from ..state import StateFunctions

FIELD_TOL = 1e-8
SCALAR_TOL = 1e-10
N_CELLS = 128


class TamperedBeta(StateFunctions):
    """State maps with beta and beta' scaled by a constant (fault injection)."""

    def __init__(self, base: StateFunctions, factor):
        super().__init__(base.gamma, base.alpha, base.c_alpha, base.epsilon)
        object.__setattr__(self, "factor", factor)

    def beta(self, rho):
        return self.factor * super().beta(rho)

    def dbeta(self, rho):
        return self.factor * super().dbeta(rho)


def _trig(rng, x, kind, amp):
    k = np.arange(1, 5)
    a = rng.uniform(-1, 1, size=4) / k
    a *= amp / np.sum(np.abs(a))
    arg = np.pi * np.outer(x, k)
    if kind == "cos":
        return np.cos(arg) @ a, -np.sin(arg) @ (np.pi * k * a)
    return np.sin(arg) @ a, np.cos(arg) @ (np.pi * k * a)


def draw(seed, index, beta_factor=1.0):
    """Parameters and fields of one draw, reproducible from (seed, index)."""
    rng = np.random.default_rng([seed, index])
    alpha = -1.0 if rng.random() < 0.2 else float(rng.uniform(-1, 1.5))
    state = StateFunctions(gamma=float(rng.uniform(1.1, 3.0)), alpha=alpha,
                           c_alpha=float(rng.uniform(0.05, 1.0)),
                           epsilon=float(10 ** rng.uniform(-2, 0)))
    if beta_factor != 1.0:
        state = TamperedBeta(state, beta_factor)
    grid = Grid1D(n_cells=N_CELLS)
    x = grid.x
    b, bx = _trig(rng, x, "cos", 0.6)
    rho, rho_x = 1.0 + b, bx
    r = 1.0 + _trig(rng, x, "cos", 0.6)[0]
    J = _trig(rng, x, "sin", 1.0)[0]
    U = _trig(rng, x, "sin", 1.0)[0]
    V = _trig(rng, x, "sin", 3.0)[0]
    flow = FlowState(rho, J, grid, state)
    # closed-form gradients in place of the stencil ones
    flow.__dict__["grad_rho"] = rho_x
    flow.__dict__["grad_beta"] = np.asarray(state.dbeta(rho)) * rho_x
    m = rho * np.asarray(state.aux_velocity(rho, rho_x))
    flow.__dict__["m"] = m
    flow.__dict__["v"] = m / rho
    rho_star = float(rng.uniform(1e-3, 10.0))
    return state, flow, r, U, V, rho_star


def _rel(a, b, scale=None):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = max(float(np.max(np.abs(a))), float(np.max(np.abs(b)))) if scale is None else scale
    return float(np.max(np.abs(a - b)) / max(s, 1e-300))


def _antiderivative(f, df, a, b):
    val, _ = quad(lambda s: float(df(s)), a, b, epsabs=0, epsrel=1e-13, limit=200)
    return val, float(f(b) - f(a))


def identities_for(state, flow, r, U, V, rho_star):
    """List of (name, residual, tol) for one draw; inequality checks report
    the violation size as residual with zero tolerance."""
    out = []
    E = entropy.entropy_E(flow, r, U)
    Eh = entropy.entropy_Eh(flow, r, U, V)
    gap = entropy.eh_minus_e(flow, V)
    out.append(("relative_entropy_expanded", _rel(E, entropy.entropy_E_expanded(flow, r, U)), FIELD_TOL))
    out.append(("high_order_expanded", _rel(Eh, entropy.entropy_Eh_expanded(flow, r, U, V)), FIELD_TOL))
    out.append(("high_order_gap", _rel(Eh - E, gap, scale=max(abs(E), abs(Eh))), FIELD_TOL))
    out.append(("high_order_zero_V", _rel(entropy.entropy_Eh(flow, r, U, 0 * V), E), FIELD_TOL))
    out.append(("energy_beta_vs_k", _rel(total_energy(flow), total_energy_k_form(flow)), FIELD_TOL))
    out.append(("nonnegative_E", max(0.0, -E), 0.0))
    out.append(("nonnegative_E_h", max(0.0, -Eh), 0.0))

    rho = flow.rho
    g = state.gamma
    out.append(("pressure_relative_energy",
                _rel(entropy.pressure_defect(state, rho, r), (g - 1) * state.relative_internal_energy(rho, r)),
                SCALAR_TOL))
    out.append(("nonnegative_relative_energy", max(0.0, -float(np.min(state.relative_internal_energy(rho, r)))), 0.0))
    out.append(("enthalpy_pressure", _rel(rho * state.enthalpy(rho) - state.internal_energy(rho),
                                          state.pressure(rho)), SCALAR_TOL))
    out.append(("second_derivative_pressure", _rel(rho * state.d2_internal_energy(rho), state.dpressure(rho)),
                SCALAR_TOL))
    k = state.capillarity_k(rho)
    out.append(("beta_squared_k", _rel(state.dbeta(rho) ** 2, k), SCALAR_TOL))
    out.append(("mu_squared_rho_k", _rel(state.dmu(rho) ** 2, rho * k), SCALAR_TOL))
    out.append(("theta_mu", _rel(rho * state.dtheta(rho), state.dmu(rho)), SCALAR_TOL))
    out.append(("K_rho_k", _rel(state.dK(rho), rho * k), SCALAR_TOL))
    # K'' vanishes identically for alpha = -1, so measure against k itself
    out.append(("K_second", _rel(state.d2K(rho), k + rho * state.capillarity_dk(rho),
                                 scale=float(np.max(k))), SCALAR_TOL))
    out.append(("capillarity_omega", _rel(np.abs(rho * state.capillarity_dk(rho)), state.omega * k), SCALAR_TOL))

    # scalar maps against their derivatives on [rho_lo, rho_hi]
    lo, hi = float(rho.min()), float(rho.max())
    for name, f, df in (("beta", state.beta, state.dbeta), ("mu", state.mu, state.dmu),
                        ("theta", state.theta, state.dtheta), ("K", state.K, state.dK),
                        ("internal_energy", state.internal_energy, state.enthalpy)):
        q, d = _antiderivative(f, df, lo, hi)
        out.append((f"{name}_antiderivative", _rel(q, d), SCALAR_TOL))
    # f(rho) = rho int_0^rho p(s) / s^2 ds
    q, _ = quad(lambda s: s ** (g - 2), 0.0, rho_star, epsabs=0, epsrel=1e-13, limit=200)
    out.append(("internal_energy_quadrature", _rel(rho_star * q, state.internal_energy(rho_star)), SCALAR_TOL))
    return out


def check_identities(seed=0, count=100, beta_factor=1.0):
    """Run the suite on ``count`` draws; returns (rows, all_passed)."""
    rows = []
    for i in range(count):
        state, flow, r, U, V, rho_star = draw(seed, i, beta_factor)
        for name, res, tol in identities_for(state, flow, r, U, V, rho_star):
            rows.append({"identity": name, "draw": i, "seed": seed, "residual": res,
                         "tol": tol, "passed": bool(res <= tol)})
    return rows, all(r["passed"] for r in rows)
