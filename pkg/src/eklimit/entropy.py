"""
Relative-entropy functionals between an Euler-Korteweg state and a smooth
Euler reference, their remainder terms, and the Gronwall bookkeeping.

Everything is evaluated with the same midpoint quadrature as the solvers,
so algebraic identities between the different forms close to round-off.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .boundary_layer import BoundaryLayerField
from .ek import FlowState, total_energy
from .euler import EulerReference
from .grid import integrate


def _I(f, flow):
    return integrate(f, flow.dx)


# -- functionals --------------------------------------------------------------

def entropy_E(flow: FlowState, r, U):
    """int |Lambda - sqrt(rho) U|^2 / 2 + f(rho | r) + eps^2 |beta(rho)_x|^2 / 2."""
    s = flow.state
    dens = 0.5 * (flow.Lambda - flow.sqrt_rho * U) ** 2 \
        + s.relative_internal_energy(flow.rho, r) + 0.5 * s.epsilon**2 * flow.grad_beta**2
    return _I(dens, flow)


def entropy_E_expanded(flow: FlowState, r, U):
    """Same value as E_EK - int (J U + rho (f'(r) - U^2/2)) + int p(r)."""
    s = flow.state
    return total_energy(flow) - _I(flow.J * U + flow.rho * (s.enthalpy(r) - 0.5 * U**2), flow) \
        + _I(s.pressure(r), flow)


def entropy_Eh(flow: FlowState, r, U, V):
    """High-order functional: adds eps^2 |beta(rho)_x - sqrt(rho) V|^2 / 2 in place
    of the absolute capillary energy."""
    s = flow.state
    dens = 0.5 * (flow.Lambda - flow.sqrt_rho * U) ** 2 \
        + 0.5 * s.epsilon**2 * (flow.grad_beta - flow.sqrt_rho * V) ** 2 \
        + s.relative_internal_energy(flow.rho, r)
    return _I(dens, flow)


def entropy_Eh_expanded(flow: FlowState, r, U, V):
    s = flow.state
    e2 = s.epsilon**2
    inner = flow.J * U + flow.rho * (-0.5 * U**2 - 0.5 * e2 * V**2 + e2 * flow.v * V
                                     + s.enthalpy(r))
    return total_energy(flow) - _I(inner, flow) + _I(s.pressure(r), flow)


def eh_minus_e(flow: FlowState, V):
    """int eps^2 rho |V|^2 / 2 - eps^2 m V, the gap between the two functionals."""
    e2 = flow.state.epsilon**2
    return _I(0.5 * e2 * flow.rho * V**2 - e2 * flow.m * V, flow)


def pressure_defect(state, rho, r):
    """p(rho) - p(r) - p'(r) (rho - r)."""
    return state.pressure(rho) - state.pressure(r) - state.dpressure(r) * (rho - r)


# -- remainders ---------------------------------------------------------------

def remainder_R(flow: FlowState, ref: EulerReference):
    """The five remainder integrals of the first-order entropy inequality."""
    s = flow.state
    e2 = s.epsilon**2
    u, u_x, u_xx = ref.u, ref.u_x, ref.u_xx
    lam = flow.Lambda - flow.sqrt_rho * u
    kx = flow.state.dK(flow.rho) * flow.grad_rho
    d2k = np.asarray(s.d2K(flow.rho))
    out = {
        "R1": -_I(lam * lam * u_x, flow),
        "R2": -_I(u_x * pressure_defect(s, flow.rho, ref.rho), flow),
        "R3": -_I(e2 * flow.grad_beta**2 * u_x, flow),
        "R4": -_I(0.5 * e2 * d2k * flow.grad_rho**2 * u_x, flow),
        "R5": -_I(e2 * kx * u_xx, flow),
    }
    out["R"] = sum(out[f"R{k}"] for k in range(1, 6))
    return out


def remainder_Rh(flow: FlowState, ref: EulerReference, bl: BoundaryLayerField):
    """Relative, layer and inconsistency remainders of the high-order inequality.

    One-dimensional transcription of each integral; v_E is the uncorrected
    reference auxiliary velocity and v_bl the corrector.
    """
    s = flow.state
    e2 = s.epsilon**2
    rho, J, m = flow.rho, flow.J, flow.m
    sq = flow.sqrt_rho
    u, u_x, u_xx = ref.u, ref.u_x, ref.u_xx
    vE, vE_x, vE_xx = ref.v, ref.v_x, ref.v_xx
    muE, muE_x = ref.dmu, ref.dmu_x
    mu, mu_x = flow.dmu, flow.grad_dmu
    vb, vb_x, vb_xx, vb_t = bl.v_bl, bl.v_bl_x, bl.v_bl_xx, bl.dt_v_bl
    vEbl = vE - vb

    lam = flow.Lambda - sq * u
    gb = flow.grad_beta - sq * vE
    R_rel = (-_I((lam * lam + e2 * gb * gb) * u_x, flow)
             + e2 * _I((m - rho * vE) * ((muE_x - mu_x) * u_x + (muE - mu) * u_xx), flow)
             + e2 * _I((J - rho * u) * ((mu_x - muE_x) * vE_x + (mu - muE) * vE_xx), flow)
             - _I(pressure_defect(s, rho, ref.rho) * u_x, flow))

    bl_terms = [
        -e2 * _I((rho * vEbl - m) * vb_t, flow),
        e2 * _I(J * (vb * vb_x - vb * vE_x - vE * vb_x), flow),
        e2 * _I(rho * vb * vE * u_x, flow),
        e2 * _I(rho * vb * (muE_x - mu_x) * u_x, flow),
        e2 * _I(rho * (muE - mu) * vb * u_xx, flow),
        -e2 * _I(mu * J * vb_xx, flow),
        -e2 * _I(rho * mu * vb_x * u_x, flow),
        -e2 * _I(mu * vb * flow.grad_rho * u_x, flow),
        -e2 * _I(J * mu_x * vb_x, flow),
        e2 * _I(vb_x * m * u + m * vb * u_x - u_x * m * vb - m * u * vb_x, flow),
    ]
    R_in = -e2 * _I((rho * u - J) * ref.inconsistency, flow)

    out = {"R_rel": R_rel, "R_in": R_in}
    for k, val in enumerate(bl_terms, 1):
        out[f"R_bl_{k}"] = val
    out["R_bl"] = float(sum(bl_terms))
    out["R_h"] = R_rel + out["R_bl"] + R_in
    return out


def remainder_Rh_general(flow: FlowState, r, r_x, r_t, U, U_x, U_xx, U_t, V, V_x, V_xx, V_t):
    """Growth rate of the high-order functional for arbitrary smooth test fields.

    Integrand by integrand this is the bound of the high-order entropy
    inequality before any reference equation is used:

        int (rho U - J) U_t + eps^2 (rho V - m) V_t + (J U - Lambda^2) U_x
          + eps^2 (J V V_x + mu'(rho) J V_xx + J mu'(rho)_x V_x)
          - eps^2 (beta_x^2 U_x + K'' rho_x^2 U_x / 2 + K_x U_xx)
          - p(rho) U_x - (rho - r) f'(r)_t - J f'(r)_x

    U and V must vanish at the walls.  For an exact smooth solution it equals
    the time derivative of ``entropy_Eh``.
    """
    s = flow.state
    e2 = s.epsilon**2
    rho, J, m = flow.rho, flow.J, flow.m
    mu, mu_x = flow.dmu, flow.grad_dmu
    kx = s.dK(rho) * flow.grad_rho
    d2k = np.asarray(s.d2K(rho))
    d2f = np.asarray(s.d2_internal_energy(r))
    dens = ((rho * U - J) * U_t + e2 * (rho * V - m) * V_t + (J * U - flow.Lambda**2) * U_x
            + e2 * (J * V * V_x + mu * J * V_xx + J * mu_x * V_x)
            - e2 * (flow.grad_beta**2 * U_x + 0.5 * d2k * flow.grad_rho**2 * U_x + kx * U_xx)
            - s.pressure(rho) * U_x - (rho - r) * d2f * r_t - J * d2f * r_x)
    return _I(dens, flow)


def remainder_Rh_direct(flow: FlowState, ref: EulerReference, bl: BoundaryLayerField):
    """``remainder_Rh_general`` at (r, U, V) = (rho_E, u_E, v_E - v_bl)."""
    return remainder_Rh_general(
        flow, ref.rho, ref.rho_x, ref.rho_t, ref.u, ref.u_x, ref.u_xx, ref.u_t,
        ref.v - bl.v_bl, ref.v_x - bl.v_bl_x, ref.v_xx - bl.v_bl_xx, ref.v_t - bl.dt_v_bl)


def distances(flow: FlowState, ref: EulerReference):
    """Distances between the capillary state and the reference solution."""
    s = flow.state
    dx = flow.dx
    diff = flow.rho - ref.rho
    g = s.gamma
    return {
        "dist_L1": float(np.sum(np.abs(diff)) * dx),
        "dist_Lgamma": float((np.sum(np.abs(diff) ** g) * dx) ** (1 / g)),
        "dist_Lambda": float(np.sqrt(np.sum((flow.Lambda - flow.sqrt_rho * ref.u) ** 2) * dx)),
        "dist_gradbeta": float(s.epsilon * np.sqrt(np.sum((flow.grad_beta - flow.sqrt_rho * ref.v) ** 2) * dx)),
        "dist_J_L1": float(np.sum(np.abs(flow.J - ref.rho * ref.u)) * dx),
    }


def momentum_bound(flow: FlowState, ref: EulerReference, dist):
    """Triangle-inequality bound ||u_E||_inf dist_L1 + ||sqrt(rho)||_2 dist_Lambda."""
    return float(np.abs(ref.u).max() * dist["dist_L1"]
                 + np.sqrt(np.sum(flow.rho) * flow.dx) * dist["dist_Lambda"])


# -- time series and Gronwall checks ------------------------------------------

SERIES_FIELDS = (
    ["t", "mass", "E_EK", "E", "E_h", "E_h_E", "vbl_energy"]
    + [f"R{k}" for k in range(1, 6)] + ["R"]
    + ["R_rel", "R_in"] + [f"R_bl_{k}" for k in range(1, 11)] + ["R_bl", "R_h", "R_h_direct"]
    + ["dist_L1", "dist_Lgamma", "dist_Lambda", "dist_gradbeta", "dist_J_L1"]
)


@dataclass
class EntropyReport:
    """Per-sample entropy diagnostics of one run, keyed by ``SERIES_FIELDS``."""

    epsilon: float
    n_cells: int
    rows: list = field(default_factory=list)

    def add(self, flow: FlowState, ref: EulerReference, bl: BoundaryLayerField):
        s = flow.state
        row = {"t": flow.t, "mass": flow.mass(), "E_EK": total_energy(flow)}
        row["E"] = entropy_E(flow, ref.rho, ref.u)
        row["E_h"] = entropy_Eh(flow, ref.rho, ref.u, bl.v_E_bl)
        row["E_h_E"] = entropy_Eh(flow, ref.rho, ref.u, ref.v)
        row["vbl_energy"] = 0.5 * s.epsilon**2 * _I(flow.rho * bl.v_bl**2, flow)
        row.update(remainder_R(flow, ref))
        row.update(remainder_Rh(flow, ref, bl))
        row["R_h_direct"] = remainder_Rh_direct(flow, ref, bl)
        row.update(distances(flow, ref))
        self.rows.append(row)
        return row

    def column(self, name):
        return np.array([r[name] for r in self.rows])

    def table(self):
        return list(SERIES_FIELDS), [[r[k] for k in SERIES_FIELDS] for r in self.rows]


def discrete_tolerance(dx, dt, scale, factor=10.0):
    """Budget factor * (dx^2 + dt^2) * scale for the discrete entropy inequalities."""
    return factor * (dx**2 + dt**2) * scale


def gronwall_check(report: EntropyReport, dx, tol_scale=None, tol_factor=10.0):
    """Check both entropy inequalities at every sample and fit the remainder constant.

    margin(tau) = E(0) + int_0^tau R - E(tau) must stay above -tol, where tol
    follows ``discrete_tolerance`` with the sample spacing as dt.  The scale
    is the peak of the functional being bounded (max E, resp. max E_h)
    unless ``tol_scale`` is given.  C_fit = max |R| / max(E, 1e-14).
    """
    t = report.column("t")
    E, Eh = report.column("E"), report.column("E_h")
    R, Rh = report.column("R"), report.column("R_h")
    dt = float(np.max(np.diff(t))) if len(t) > 1 else 0.0
    scale = float(np.max(E)) if tol_scale is None else tol_scale
    scale_h = float(np.max(Eh)) if tol_scale is None else tol_scale
    tol = float(discrete_tolerance(dx, dt, scale, tol_factor))
    tol_h = float(discrete_tolerance(dx, dt, scale_h, tol_factor))
    margin = E[0] + cumulative_trapezoid(R, t, initial=0.0) - E
    margin_h = Eh[0] + cumulative_trapezoid(Rh, t, initial=0.0) - Eh
    margin_hd = Eh[0] + cumulative_trapezoid(report.column("R_h_direct"), t, initial=0.0) - Eh
    c_fit = float(np.max(np.abs(R) / np.maximum(E, 1e-14)))
    c_fit_h = float(np.max(np.abs(Rh) / np.maximum(Eh, 1e-14)))
    # uncorrected vs corrected functional: E_h^E / 2 <= E_h + eps^2/2 int rho v_bl^2
    half = 0.5 * report.column("E_h_E") - Eh - report.column("vbl_energy")
    # Gronwall envelope E(tau) <= exp(C_fit tau) (E(0) + tol)
    envelope = np.exp(c_fit * t) * (E[0] + tol) - E
    return {
        "tol": tol,
        "tol_h": tol_h,
        "min_margin": float(margin.min()),
        "min_margin_h": float(margin_h.min()),
        "min_margin_h_direct": float(margin_hd.min()),
        "ok": bool(margin.min() >= -tol),
        "ok_h": bool(margin_h.min() >= -tol_h),
        "C_fit": c_fit,
        "C_fit_h": c_fit_h,
        "max_half_gap": float(half.max()),
        "ok_half": bool(half.max() <= 1e-14 * max(1.0, float(np.abs(Eh).max()))),
        "min_envelope_margin": float(envelope.min()),
        "margin": margin,
        "margin_h": margin_h,
    }
