"""
Boundary-layer corrector for the reference auxiliary velocity.

The reference density does not satisfy the Neumann condition in general, so
v(rho_E) = theta(rho_E)_x need not vanish at the walls.  The corrector is the
gradient of a cut-off potential,

    v_bl = d/dx [ chi(d(x) / (c delta)) theta(rho_E) ],

with d the distance to the nearest wall.  chi is identically 1 near the wall,
so v_E - v_bl vanishes there, and it vanishes for d >= c delta.
"""

from dataclasses import dataclass

import numpy as np

from .euler import EulerSnapshot, derived_fields, _d1, _d2, wall_trace
from .grid import EVEN, ODD, Grid1D, restrict
from .state import StateFunctions

PLATEAU = 0.25


class LayerConfigError(ValueError):
    """Inadmissible layer width or rate exponent."""


def cutoff(xi, order=0):
    """Nonic smoothstep profile and its first two derivatives.

    chi = 1 on [0, 1/4], chi = 0 on [1, inf), nonincreasing between, with
    four continuous derivatives so that third derivatives of chi * theta,
    which enter v_bl_xx, stay continuous across the layer edges.
    """
    xi = np.asarray(xi, dtype=float)
    w = 1.0 - PLATEAU
    s = np.clip((xi - PLATEAU) / w, 0.0, 1.0)
    if order == 0:
        # evaluate each half from its nearer endpoint so chi hits 1 and 0 exactly
        return np.where(s < 0.5, 1.0 - _step(s), _step(1.0 - s))
    if order == 1:
        return -630 * s**4 * (1 - s) ** 4 / w
    if order == 2:
        return -2520 * s**3 * (1 - s) ** 3 * (1 - 2 * s) / w**2
    raise ValueError("order must be 0, 1 or 2")


def _step(s):
    return s**5 * (126 + s * (-420 + s * (540 + s * (-315 + 70 * s))))


def s_max(alpha, d=1):
    """Supremum of admissible rate exponents s for a layer width eps^s."""
    if d == 1:
        b = (5 + alpha) / (3 * (3 + alpha))
    elif d == 2:
        b = (3 + alpha) / (3 * (2 + alpha))
    else:
        b = (d * (1 + alpha) + 4) / (3 * (d * (1 + alpha) + 2))
    return min(0.5, b)


def default_s(alpha, d=1):
    return 0.9 * s_max(alpha, d)


def check_s(s, alpha, d=1):
    if not 0 < s < s_max(alpha, d):
        raise LayerConfigError(f"s={s:g} outside (0, {s_max(alpha, d):g}) for d={d}, alpha={alpha:g}")


def layer_width(epsilon, s):
    return epsilon**s


@dataclass
class BoundaryLayerField:
    """Corrector fields on a target grid together with the layer metadata."""

    grid: Grid1D
    t: float
    c: float
    delta: float
    s: float
    v_bl: np.ndarray
    v_bl_x: np.ndarray
    v_bl_xx: np.ndarray
    dt_v_bl: np.ndarray
    v_bl_product: np.ndarray
    v_E: np.ndarray
    wall_v_E: tuple
    wall_v_bl: tuple

    @property
    def v_E_bl(self):
        return self.v_E - self.v_bl

    def wall_mismatch(self):
        """(v_E - v_bl) at the left and right walls."""
        return (self.wall_v_E[0] - self.wall_v_bl[0], self.wall_v_E[1] - self.wall_v_bl[1])


def build_vbl(snap: EulerSnapshot, state: StateFunctions, c=1.0, delta=0.1, grid: Grid1D = None,
              s=float("nan")):
    """Build the corrector from a reference snapshot.

    Derivatives are taken on the snapshot grid with fourth-order stencils and
    then transferred to ``grid``.  The potential chi * theta(rho_E) is even
    across each wall, so its gradient carries the odd parity of a velocity.
    """
    fine = snap.grid
    if not c * delta < 0.5 * fine.length:
        raise LayerConfigError(f"c*delta={c * delta:g} must be below half the domain length")
    grid = fine if grid is None else grid
    factor = fine.n_cells // grid.n_cells
    dx = fine.dx
    x = fine.x
    dist = fine.d_omega(x)
    nd = fine.grad_d_omega(x)
    w = c * delta

    rho = snap.rho
    ref = derived_fields(snap, state)
    rho_x = ref["rho_x"][0]
    rho_t = ref["rho_t"][0]
    th = np.asarray(state.theta(rho))
    dth = np.asarray(state.dtheta(rho))
    chi = cutoff(dist / w)

    pot = chi * th
    v_bl = _d1(pot, EVEN, dx)
    v_bl_x = _d2(pot, EVEN, dx)
    v_bl_xx = _d1(v_bl_x, EVEN, dx)
    dt_v_bl = _d1(chi * dth * rho_t, EVEN, dx)
    product = chi * dth * rho_x + th * cutoff(dist / w, 1) * nd / w

    # wall values from the product formula at d = 0
    rw = wall_trace(rho, EVEN)
    rxw = (_wall_slope(rho, dx, 0), _wall_slope(rho, dx, 1))
    vE_w = tuple(float(state.dtheta(r) * g) for r, g in zip(rw, rxw))
    chi0, dchi0 = float(cutoff(0.0)), float(cutoff(0.0, 1))
    vbl_w = (chi0 * float(state.dtheta(rw[0])) * rxw[0] + float(state.theta(rw[0])) * dchi0 / w,
             chi0 * float(state.dtheta(rw[1])) * rxw[1] - float(state.theta(rw[1])) * dchi0 / w)

    def tr(f, pol):
        return restrict(f, factor, pol)

    return BoundaryLayerField(
        grid=grid, t=snap.t, c=c, delta=delta, s=s,
        v_bl=tr(v_bl, ODD), v_bl_x=tr(v_bl_x, EVEN), v_bl_xx=tr(v_bl_xx, ODD),
        dt_v_bl=tr(dt_v_bl, ODD), v_bl_product=tr(product, ODD),
        v_E=tr(ref["v"][0], ODD), wall_v_E=vE_w, wall_v_bl=vbl_w)


def _wall_slope(f, dx, side):
    """One-sided fourth-order derivative at a wall from interior cell values.

    Uses no ghost information, so it measures the true wall slope of data
    that need not satisfy the Neumann condition.
    """
    # weights of the derivative at x = 0 of the quartic through x = dx/2 + k dx
    xs = (np.arange(5) + 0.5) * dx
    V = np.vander(xs, 5, increasing=True)
    wts = np.linalg.solve(V.T, np.array([0.0, 1.0, 0.0, 0.0, 0.0]))
    if side == 0:
        return float(wts @ f[:5])
    return -float(wts @ f[::-1][:5])


def scaling_report(snap: EulerSnapshot, state: StateFunctions, deltas, c=1.0):
    """Sup norms of v_bl, its gradient and its time derivative per layer width.

    Returns the table rows (delta, sup|v_bl|, sup|v_bl_x|, sup|dt v_bl|) and
    least-squares log-log slopes of the first three columns against delta.
    """
    rows = []
    for d in deltas:
        bl = build_vbl(snap, state, c=c, delta=d)
        rows.append((float(d), float(np.abs(bl.v_bl).max()), float(np.abs(bl.v_bl_x).max()),
                     float(np.abs(bl.dt_v_bl).max())))
    rows = np.array(rows)
    ld = np.log(rows[:, 0])
    slopes = {}
    for k, name in ((1, "sup_vbl"), (2, "sup_grad_vbl"), (3, "sup_dt_vbl")):
        # a column of zeros (e.g. dt v_bl for data at rest) has no slope
        ok = np.all(rows[:, k] > 0)
        slopes[name] = float(np.polyfit(ld, np.log(rows[:, k]), 1)[0]) if ok else float("nan")
    return rows, slopes
