"""
Smooth reference solutions of the isentropic Euler equations

    rho_t + (rho u)_x = 0,    u_t + u u_x + f'(rho)_x = 0

on an interval with u = 0 at the walls.  Fourth-order centered stencils and
classical RK4 on a grid finer than the Euler-Korteweg grid; the velocity is
extended oddly past the walls, so its wall trace vanishes identically.  The
run stops when the flow stops being smooth (steep velocity gradient or
density near vacuum), which defines the usable time window.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import EVEN, ODD, Grid1D, d1_4th, d2_4th, extend, restrict
from .state import StateFunctions

NG = 2


class WindowError(RuntimeError):
    """The smooth-solution window ended before a requested time."""


def _d1(f, policy, dx):
    return d1_4th(extend(f, policy, NG), dx, NG)


def _d2(f, policy, dx):
    return d2_4th(extend(f, policy, NG), dx, NG)


def euler_rhs(rho, u, dx, state: StateFunctions):
    """Tendencies (rho_t, u_t) of the non-conservative smooth form."""
    rho_t = -_d1(rho * u, ODD, dx)
    u_t = -u * _d1(u, ODD, dx) - _d1(state.enthalpy(rho), EVEN, dx)
    return rho_t, u_t


def momentum_rhs_conservative(rho, u, dx, state: StateFunctions):
    """(rho u)_t = -(rho u^2 + p)_x, for comparison with rho u_t + u rho_t."""
    return -_d1(rho * u * u + state.pressure(rho), EVEN, dx)


def max_velocity_gradient(u, dx):
    return float(np.max(np.abs(_d1(u, ODD, dx))))


def wall_trace(f, policy):
    """Four-point interpolation of a cell-centered field onto both walls."""
    e = extend(f, policy, NG)
    left = (-e[0] + 9 * e[1] + 9 * e[2] - e[3]) / 16
    right = (-e[-4] + 9 * e[-3] + 9 * e[-2] - e[-1]) / 16
    return left, right


@dataclass
class EulerSnapshot:
    grid: Grid1D
    t: float
    rho: np.ndarray
    u: np.ndarray


@dataclass
class EulerRun:
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    t_window: float = 0.0
    completed: bool = True
    reason: str = ""
    monitor: list = field(default_factory=list)     # (t, max|u_x|, min rho)

    def at(self, t):
        for s in self.snapshots:
            if abs(s.t - t) <= 1e-12 * max(1.0, abs(t)):
                return s
        raise KeyError(f"no reference snapshot at t={t}")

    def require(self, tau, margin=0.9):
        """Raise unless ``tau`` lies within ``margin`` times the window."""
        if tau > margin * self.t_window + 1e-14:
            raise WindowError(f"tau={tau:g} exceeds {margin:g} * T_window = "
                              f"{margin * self.t_window:g} ({self.reason or 'end of run'})")


def rk4_step(rho, u, dt, dx, state):
    k1 = euler_rhs(rho, u, dx, state)
    k2 = euler_rhs(rho + 0.5 * dt * k1[0], u + 0.5 * dt * k1[1], dx, state)
    k3 = euler_rhs(rho + 0.5 * dt * k2[0], u + 0.5 * dt * k2[1], dx, state)
    k4 = euler_rhs(rho + dt * k3[0], u + dt * k3[1], dx, state)
    rho = rho + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    u = u + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return rho, u


def run_reference(state: StateFunctions, grid: Grid1D, rho0, u0, t_end, sample_times=None,
                  cfl=0.5, blowup_factor=50.0, floor=1e-10):
    """Integrate the Euler system until ``t_end`` or loss of smoothness.

    The blow-up threshold is ``blowup_factor * max(max|u0_x|, 1)``: relative
    to the initial gradient, with unit scale when the data start at rest.
    Snapshots are stored at ``sample_times`` that fall inside the window.
    """
    rho = np.array(rho0, dtype=float)
    u = np.array(u0, dtype=float)
    if np.min(rho) <= floor:
        raise ValueError("reference data must be bounded away from vacuum")
    dx = grid.dx
    if sample_times is None:
        sample_times = [0.0, t_end]
    targets = sorted(set(float(t) for t in sample_times if 0 < t <= t_end) | {float(t_end)})
    g0 = max_velocity_gradient(u, dx)
    threshold = blowup_factor * max(g0, 1.0)

    out = EulerRun()
    t = 0.0
    sample_set = set(float(t) for t in sample_times)

    def record(t):
        out.monitor.append((t, max_velocity_gradient(u, dx), float(rho.min())))
        if t in sample_set:
            out.times.append(t)
            out.snapshots.append(EulerSnapshot(grid, t, rho.copy(), u.copy()))

    record(0.0)
    for tt in targets:
        while t < tt - 1e-14 * max(1.0, tt):
            c = np.sqrt(state.gamma * rho ** (state.gamma - 1))
            dt = cfl * dx / float(np.max(np.abs(u) + c))
            if t + dt > tt:
                dt = tt - t
            rho_new, u_new = rk4_step(rho, u, dt, dx, state)
            gmax = max_velocity_gradient(u_new, dx)
            if not np.all(np.isfinite(rho_new)) or np.min(rho_new) < floor or gmax >= threshold:
                out.completed = False
                out.reason = ("density reached the vacuum floor" if np.min(rho_new) < floor
                              else f"max|u_x| reached {gmax:.3g} >= {threshold:.3g}")
                out.t_window = t
                return out
            rho, u = rho_new, u_new
            t = t + dt
        t = tt
        record(t)
    out.t_window = float(t_end)
    return out


def derived_fields(snap: EulerSnapshot, state: StateFunctions):
    """All reference fields needed by the entropy diagnostics, on the snapshot grid.

    Returns a dict of arrays together with the ghost parity of each entry.
    The time derivative of v is taken from its own transport equation,
    v_t = -(u v + mu'(rho) u_x)_x.
    """
    dx = snap.grid.dx
    rho, u = snap.rho, snap.u
    rho_t, u_t = euler_rhs(rho, u, dx, state)
    rho_x = _d1(rho, EVEN, dx)
    rho_xx = _d2(rho, EVEN, dx)
    u_x = _d1(u, ODD, dx)
    u_xx = _d2(u, ODD, dx)
    mu1 = np.asarray(state.dmu(rho))
    v = np.asarray(state.dtheta(rho)) * rho_x
    v_x = _d1(v, ODD, dx)
    v_xx = _d2(v, ODD, dx)
    out = {
        "rho": (rho, EVEN),
        "u": (u, ODD),
        "rho_t": (rho_t, EVEN),
        "u_t": (u_t, ODD),
        "rho_x": (rho_x, ODD),
        "rho_xx": (rho_xx, EVEN),
        "rho_xxx": (_d1(rho_xx, EVEN, dx), ODD),
        "u_x": (u_x, EVEN),
        "u_xx": (u_xx, ODD),
        "u_xxx": (_d1(u_xx, ODD, dx), EVEN),
        "v": (v, ODD),
        "v_x": (v_x, EVEN),
        "v_xx": (v_xx, ODD),
        "v_t": (-_d1(u * v + mu1 * u_x, EVEN, dx), ODD),
        "v_from_theta": (_d1(np.asarray(state.theta(rho)), EVEN, dx), ODD),
        "dmu": (mu1, EVEN),
        "dmu_x": (_d1(mu1, EVEN, dx), ODD),
        # gradient of mu'(rho) v_x + |v|^2 / 2, the forcing left when the
        # Euler solution is inserted into the capillary system
        "inconsistency": (_d1(mu1 * v_x + 0.5 * v * v, EVEN, dx), ODD),
    }
    return out


@dataclass
class EulerReference:
    """Reference fields at one time, transferred to a target grid."""

    t: float
    grid: Grid1D
    fields: dict

    def __getattr__(self, name):
        try:
            return self.__dict__["fields"][name]
        except KeyError:
            raise AttributeError(name) from None

    @classmethod
    def from_snapshot(cls, snap: EulerSnapshot, state: StateFunctions, grid: Grid1D = None):
        grid = snap.grid if grid is None else grid
        factor = snap.grid.n_cells // grid.n_cells
        if factor * grid.n_cells != snap.grid.n_cells:
            raise ValueError("reference grid must refine the target grid by an integer factor")
        fields = {k: restrict(v, factor, pol) for k, (v, pol) in derived_fields(snap, state).items()}
        return cls(snap.t, grid, fields)
