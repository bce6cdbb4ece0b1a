"""
Finite-volume solver for the one-dimensional Euler-Korteweg system

    rho_t + J_x = 0
    J_t + (J^2/rho + p(rho))_x = eps^2 (K(rho)_xx - K''(rho) rho_x^2 / 2 - beta(rho)_x^2)_x

on an interval with no-flux walls (J = 0 and rho_x = 0).  Mass and momentum
use a Rusanov flux; the capillary term is written as the divergence of a
face-centered stress so that the momentum update stays conservative.  Time
stepping is three-stage SSP Runge-Kutta.
"""

from dataclasses import dataclass, field
from functools import cached_property
import logging

import numpy as np
from scipy.integrate import simpson

from . import _kernels
from .grid import EVEN, ODD, Grid1D, gradient, integrate
from .state import StateFunctions

log = logging.getLogger(__name__)


class StabilityError(ValueError):
    """Requested step exceeds the explicit stability bound."""

    def __init__(self, dt, bound):
        super().__init__(f"dt={dt:.3e} exceeds the stability bound {bound:.3e}")
        self.dt = dt
        self.bound = bound


class NumericalFailure(RuntimeError):
    """Non-finite values appeared during a run."""


@dataclass(frozen=True)
class EKConfig:
    state: StateFunctions
    grid: Grid1D
    cfl: float = 0.8
    t_end: float = 0.5
    vacuum_floor: float = 1e-10
    energy_drift_tol: float = 1e-3
    reconstruction: str = "linear"

    def __post_init__(self):
        if not 0 < self.cfl < 1:
            raise ValueError(f"cfl must lie in (0, 1), got {self.cfl}")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not self.vacuum_floor > 0:
            raise ValueError("vacuum_floor must be positive")
        if self.reconstruction not in _kernels.RECONSTRUCTIONS:
            raise ValueError(f"unknown reconstruction {self.reconstruction!r}")

    @property
    def recon_id(self):
        return _kernels.RECONSTRUCTIONS[self.reconstruction]


class FlowState:
    """Cell averages (rho, J) on a grid with derived hydrodynamic fields.

    The density is read through the vacuum floor; ``floor_hits`` counts the
    cells where the floor was active.
    """

    def __init__(self, rho, J, grid: Grid1D, state: StateFunctions, t=0.0, floor=1e-10):
        rho = np.array(rho, dtype=float)
        J = np.array(J, dtype=float)
        if rho.shape != (grid.n_cells,) or J.shape != rho.shape:
            raise ValueError("rho and J must have one value per cell")
        self.floor_hits = int(np.count_nonzero(rho < floor))
        self.rho = np.maximum(rho, floor)
        self.J = J
        self.grid = grid
        self.state = state
        self.t = float(t)
        self.floor = floor
        self.rho.flags.writeable = False
        self.J.flags.writeable = False

    @classmethod
    def from_velocity(cls, rho, u, grid, state, t=0.0, floor=1e-10):
        rho = np.asarray(rho, dtype=float)
        return cls(rho, rho * np.asarray(u, dtype=float), grid, state, t, floor)

    @property
    def dx(self):
        return self.grid.dx

    @cached_property
    def sqrt_rho(self):
        return np.sqrt(self.rho)

    @cached_property
    def u(self):
        return self.J / self.rho

    @cached_property
    def Lambda(self):
        return self.J / self.sqrt_rho

    @cached_property
    def grad_rho(self):
        return gradient(self.rho, self.dx, EVEN).values

    @cached_property
    def grad_beta(self):
        return gradient(self.state.beta(self.rho), self.dx, EVEN).values

    @cached_property
    def m(self):
        """Auxiliary momentum sqrt(rho) beta(rho)_x."""
        return self.sqrt_rho * self.grad_beta

    @cached_property
    def v(self):
        return self.m / self.rho

    @cached_property
    def dmu(self):
        return np.asarray(self.state.dmu(self.rho))

    @cached_property
    def grad_dmu(self):
        return gradient(self.dmu, self.dx, EVEN).values

    def mass(self):
        return integrate(self.rho, self.dx)


def _params(flow: FlowState):
    s = flow.state
    return s.gamma, s.alpha, s.c_alpha, s.epsilon


def korteweg_rhs(flow: FlowState):
    """Capillary momentum tendency eps^2 (sigma_{i+1/2} - sigma_{i-1/2}) / dx.

    sigma = Lap K - K'' rho_x^2 / 2 - beta_x^2 at faces, from compact
    differences of the even-extended density.  Constant density gives
    exactly zero.
    """
    g, a, c, eps = _params(flow)
    out = np.empty(flow.grid.n_cells)
    _kernels.korteweg_tendency(np.ascontiguousarray(flow.rho), flow.dx, a, c, eps,
                               flow.floor, out)
    return out


def korteweg_rhs_mu_form(flow: FlowState):
    """Same tendency through Lap K - K'' rho_x^2/2 = mu'(rho) div m (cross-check).

    Uses wide centered stencils throughout, so it agrees with
    ``korteweg_rhs`` only to second order.
    """
    eps = flow.state.epsilon
    dx = flow.dx
    div_m = gradient(flow.m, dx, ODD).values
    q = gradient(flow.dmu * div_m, dx, EVEN).values
    bb = gradient(flow.grad_beta**2, dx, EVEN).values
    return eps**2 * (q - bb)


def hyperbolic_rhs(flow: FlowState, reconstruction="linear"):
    """Rusanov tendencies (d rho/dt, dJ/dt) of the Euler part, no flux through the walls."""
    g = flow.state.gamma
    n = flow.grid.n_cells
    drho = np.empty(n)
    dJ = np.empty(n)
    _kernels.hyperbolic_tendency(np.ascontiguousarray(flow.rho), np.ascontiguousarray(flow.J),
                                 flow.dx, g, _kernels.RECONSTRUCTIONS[reconstruction],
                                 flow.floor, drho, dJ)
    return drho, dJ


def rhs(flow: FlowState, reconstruction="linear"):
    drho, dJ = hyperbolic_rhs(flow, reconstruction)
    if flow.state.epsilon > 0:
        dJ = dJ + korteweg_rhs(flow)
    return drho, dJ


def stability_bound(flow: FlowState, cfl=1.0):
    """cfl * min(dx / max(|u| + c_s), dx^2 / (pi^2 eps max mu'(rho)))."""
    g, a, c, eps = _params(flow)
    da, dd = _kernels.stable_dt(np.ascontiguousarray(flow.rho), np.ascontiguousarray(flow.J),
                                flow.dx, g, a, c, eps, flow.floor)
    return cfl * min(da, dd)


def step(flow: FlowState, dt, reconstruction="linear"):
    """Advance one SSP-RK3 step; refuses steps above the stability bound."""
    bound = stability_bound(flow)
    if dt > bound:
        raise StabilityError(dt, bound)
    g, a, c, eps = _params(flow)
    rho = flow.rho.copy()
    J = flow.J.copy()
    comp = np.zeros_like(rho)
    hits = _kernels.ssp_rk3_step(rho, J, comp, comp.copy(), dt, flow.dx, g, a, c, eps,
                                 _kernels.RECONSTRUCTIONS[reconstruction], flow.floor)
    if not _kernels.all_finite(rho, J):
        raise NumericalFailure(f"non-finite state after step at t={flow.t + dt:.6g}")
    out = FlowState(rho, J, flow.grid, flow.state, flow.t + dt, flow.floor)
    out.floor_hits += hits
    return out


def total_energy(flow: FlowState):
    """E_EK = int J^2/(2 rho) + rho^gamma/(gamma - 1) + eps^2 |beta(rho)_x|^2 / 2."""
    s = flow.state
    dens = 0.5 * flow.J**2 / flow.rho + s.internal_energy(flow.rho) \
        + 0.5 * s.epsilon**2 * flow.grad_beta**2
    return integrate(dens, flow.dx)


def total_energy_k_form(flow: FlowState):
    """Energy with the capillary density written eps^2 k(rho) |rho_x|^2 / 2."""
    s = flow.state
    dens = 0.5 * flow.J**2 / flow.rho + s.internal_energy(flow.rho) \
        + 0.5 * s.epsilon**2 * s.capillarity_k(flow.rho) * flow.grad_rho**2
    return integrate(dens, flow.dx)


@dataclass
class Trajectory:
    """Sampled run output: snapshots at ``times`` plus per-sample diagnostics."""

    config: EKConfig
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    steps: int = 0
    floor_hits: int = 0
    aborted: bool = False
    message: str = ""

    def diagnostics(self):
        """Rows (t, mass, E_EK, min_rho, max_abs_u) for every snapshot."""
        rows = []
        for f in self.snapshots:
            rows.append((f.t, f.mass(), total_energy(f), float(f.rho.min()),
                         float(np.abs(f.u).max())))
        return np.array(rows)

    def energy_drift(self):
        d = self.diagnostics()
        return float(np.max(np.abs(d[:, 2] - d[0, 2])) / d[0, 2])

    def mass_drift(self):
        m = np.array([np.sum(f.rho) for f in self.snapshots])
        return float(np.max(np.abs(m - m[0])) / abs(m[0]))

    @property
    def final(self):
        return self.snapshots[-1]


def run(config: EKConfig, rho0, J0, sample_times=None, n_samples=10):
    """Integrate from (rho0, J0) at t = 0 to ``config.t_end``.

    Snapshots are taken at ``sample_times`` (default: ``n_samples`` equal
    intervals); steps are shortened to land on each sample exactly.  A
    non-finite state stops the run with ``aborted`` set.
    """
    s = config.state
    grid = config.grid
    if sample_times is None:
        sample_times = np.linspace(0.0, config.t_end, n_samples + 1)
    sample_times = np.asarray(sample_times, dtype=float)
    if sample_times[0] != 0.0 or np.any(np.diff(sample_times) <= 0):
        raise ValueError("sample_times must start at 0 and increase")

    rho = np.array(rho0, dtype=float)
    J = np.array(J0, dtype=float)
    if np.any(rho < config.vacuum_floor):
        log.warning("initial density below the vacuum floor in %d cells",
                    int(np.count_nonzero(rho < config.vacuum_floor)))
    comp_r = np.zeros_like(rho)
    comp_j = np.zeros_like(J)
    traj = Trajectory(config)
    traj.times.append(0.0)
    traj.snapshots.append(FlowState(rho, J, grid, s, 0.0, config.vacuum_floor))
    rho = traj.snapshots[0].rho.copy()
    t = 0.0
    for ts in sample_times[1:]:
        t, nsteps, hits, ok = _kernels.advance(
            rho, J, comp_r, comp_j, t, float(ts), grid.dx, s.gamma, s.alpha, s.c_alpha,
            s.epsilon, config.recon_id, config.vacuum_floor, config.cfl)
        t = float(ts) if ok else t
        traj.steps += nsteps
        traj.floor_hits += hits
        if not ok:
            traj.aborted = True
            traj.message = f"non-finite state at t={t:.6g}"
            log.error(traj.message)
            break
        traj.times.append(t)
        traj.snapshots.append(FlowState(rho, J, grid, s, t, config.vacuum_floor))
    if traj.floor_hits:
        log.warning("vacuum floor active %d times", traj.floor_hits)
    return traj


# -- residual checks ----------------------------------------------------------

def _time_integral(times, values):
    # Simpson keeps the time quadrature well below the spatial error
    return float(simpson(np.asarray(values), x=np.asarray(times)))


def _wall_check(phi_vals, name):
    if abs(phi_vals[0]) > 1e-12 or abs(phi_vals[-1]) > 1e-12:
        raise ValueError(f"test function {name} must vanish at both walls")


def weak_residual(traj: Trajectory, psi, psi_t, psi_x, phi=None, phi_t=None, phi_x=None,
                  phi_xx=None):
    """Residuals of the weak continuity and momentum identities.

    Test functions are callables f(x, t).  The continuity residual is

        int rho psi |_0^T - int_0^T int (rho psi_t + J psi_x)

    and the momentum residual

        int J phi |_0^T - int_0^T int (J phi_t + (Lambda^2 + p) phi_x
            + eps^2 beta_x^2 phi_x + eps^2 K'' rho_x^2 phi_x / 2 + eps^2 K_x phi_xx).

    ``phi`` must vanish at the walls.  Time integrals use Simpson's rule over
    the stored samples.
    """
    grid = traj.config.grid
    s = traj.config.state
    x = grid.x
    ts = np.array(traj.times)
    snaps = traj.snapshots
    dx = grid.dx

    def integrand_mass(f):
        return integrate(f.rho * psi_t(x, f.t) + f.J * psi_x(x, f.t), dx)

    r1 = integrate(snaps[-1].rho * psi(x, ts[-1]), dx) - integrate(snaps[0].rho * psi(x, 0.0), dx)
    r1 -= _time_integral(ts, [integrand_mass(f) for f in snaps])
    if phi is None:
        return r1, None

    _wall_check(phi(np.array([grid.x_min, grid.x_max]), 0.0), "phi")
    eps2 = s.epsilon**2

    def integrand_mom(f):
        px = phi_x(x, f.t)
        kx = gradient(s.K(f.rho), dx, EVEN).values
        d2k = np.asarray(s.d2K(f.rho))
        val = f.J * phi_t(x, f.t) + (f.Lambda**2 + s.pressure(f.rho)) * px \
            + eps2 * f.grad_beta**2 * px + 0.5 * eps2 * d2k * f.grad_rho**2 * px \
            + eps2 * kx * phi_xx(x, f.t)
        return integrate(val, dx)

    r2 = integrate(snaps[-1].J * phi(x, ts[-1]), dx) - integrate(snaps[0].J * phi(x, 0.0), dx)
    r2 -= _time_integral(ts, [integrand_mom(f) for f in snaps])
    return r1, r2


def m_equation_residual(traj: Trajectory, phi, phi_x, phi_xx):
    """Weak residual of the auxiliary momentum equation with a static test field.

        int m phi |_0^T - int_0^T int (-mu'(rho) J phi_xx - Lambda sqrt(rho) mu''(rho) rho_x phi_x)
    """
    grid = traj.config.grid
    s = traj.config.state
    x = grid.x
    dx = grid.dx
    _wall_check(phi(np.array([grid.x_min, grid.x_max])), "phi")
    ts = np.array(traj.times)
    snaps = traj.snapshots

    def integrand(f):
        d2mu = np.asarray(s.d2mu(f.rho))
        return integrate(-f.dmu * f.J * phi_xx(x)
                         - f.Lambda * f.sqrt_rho * d2mu * f.grad_rho * phi_x(x), dx)

    res = integrate(snaps[-1].m * phi(x), dx) - integrate(snaps[0].m * phi(x), dx)
    return res - _time_integral(ts, [integrand(f) for f in snaps])


def augmented_residuals(traj: Trajectory, phi, phi_x):
    """Weak residuals of the velocity pair (u, v) on a smooth positive run.

    u_t + u u_x + (f'(rho) - eps^2 mu'(rho) v_x - eps^2 v^2 / 2)_x = 0
    v_t + (u v + mu'(rho) u_x)_x = 0

    tested against a static ``phi`` vanishing at the walls.
    """
    grid = traj.config.grid
    s = traj.config.state
    x = grid.x
    dx = grid.dx
    _wall_check(phi(np.array([grid.x_min, grid.x_max])), "phi")
    ts = np.array(traj.times)
    snaps = traj.snapshots
    eps2 = s.epsilon**2
    p, px = phi(x), phi_x(x)

    def integrands(f):
        u_x = gradient(f.u, dx, ODD).values
        v_x = gradient(f.v, dx, ODD).values
        q = s.enthalpy(f.rho) - eps2 * f.dmu * v_x - 0.5 * eps2 * f.v**2
        iu = integrate(-f.u * u_x * p + q * px, dx)
        iv = integrate((f.u * f.v + f.dmu * u_x) * px, dx)
        return iu, iv

    vals = np.array([integrands(f) for f in snaps])
    ru = integrate(snaps[-1].u * p, dx) - integrate(snaps[0].u * p, dx) - _time_integral(ts, vals[:, 0])
    rv = integrate(snaps[-1].v * p, dx) - integrate(snaps[0].v * p, dx) - _time_integral(ts, vals[:, 1])
    return ru, rv


def diagnostics_table(traj: Trajectory):
    """Header and rows for the per-sample diagnostics CSV."""
    return ["t", "mass", "E_EK", "min_rho", "max_abs_u"], traj.diagnostics()
