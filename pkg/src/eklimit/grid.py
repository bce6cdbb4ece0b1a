"""
Cell-centered 1D grids, ghost-cell extension and centered difference operators.

No-flux walls are encoded by the ghost policy of each field: densities (and any
function of the density) are extended evenly across the wall, momenta and
velocities oddly.  Differentiating flips the parity, so ``gradient`` of an even
field returns an odd field and vice versa.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

EVEN = "even"
ODD = "odd"
EXTRAPOLATED = "extrapolated"
POLICIES = (EVEN, ODD, EXTRAPOLATED)

_FLIP = {EVEN: ODD, ODD: EVEN, EXTRAPOLATED: EXTRAPOLATED}


@dataclass(frozen=True)
class Grid1D:
    x_min: float = 0.0
    x_max: float = 1.0
    n_cells: int = 256

    def __post_init__(self):
        if self.n_cells < 8:
            raise ValueError(f"n_cells must be >= 8, got {self.n_cells}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def length(self):
        return self.x_max - self.x_min

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_cells

    @cached_property
    def x(self):
        x = self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx
        x.flags.writeable = False
        return x

    def d_omega(self, x=None):
        """Distance to the nearest wall."""
        x = self.x if x is None else np.asarray(x, dtype=float)
        return np.minimum(x - self.x_min, self.x_max - x)

    def grad_d_omega(self, x=None):
        """Gradient of the distance map: +1 near the left wall, -1 near the right."""
        x = self.x if x is None else np.asarray(x, dtype=float)
        mid = 0.5 * (self.x_min + self.x_max)
        return np.where(x < mid, 1.0, -1.0)

    def refined(self, factor):
        return Grid1D(self.x_min, self.x_max, self.n_cells * factor)

    def field(self, values, policy=EVEN):
        return Field(values, policy)


class Field:
    """Cell values plus the ghost policy that fixes their extension past the walls."""

    __slots__ = ("values", "policy")

    def __init__(self, values, policy=EVEN):
        if policy not in POLICIES:
            raise ValueError(f"unknown ghost policy {policy!r}")
        values = np.array(values, dtype=float)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "policy", policy)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return f"Field(n={len(self.values)}, policy={self.policy!r})"

    def extended(self, n_ghost=2):
        return extend(self.values, self.policy, n_ghost)


def extend(values, policy, n_ghost=2):
    """Pad ``values`` with ``n_ghost`` cells per side according to ``policy``."""
    v = np.asarray(values, dtype=float)
    if policy == EVEN:
        return np.pad(v, n_ghost, mode="symmetric")
    if policy == ODD:
        left = -v[n_ghost - 1::-1]
        right = -v[:-n_ghost - 1:-1]
        return np.concatenate([left, v, right])
    if policy == EXTRAPOLATED:
        # cubic extrapolation from the four nearest interior cells
        out = np.empty(len(v) + 2 * n_ghost)
        out[n_ghost:-n_ghost] = v
        for k in range(1, n_ghost + 1):
            out[n_ghost - k] = 4 * out[n_ghost - k + 1] - 6 * out[n_ghost - k + 2] \
                + 4 * out[n_ghost - k + 3] - out[n_ghost - k + 4]
            j = len(out) - n_ghost - 1 + k
            out[j] = 4 * out[j - 1] - 6 * out[j - 2] + 4 * out[j - 3] - out[j - 4]
        return out
    raise ValueError(f"unknown ghost policy {policy!r}")


def _as_field(f, policy):
    if isinstance(f, Field):
        return f
    return Field(f, policy)


def gradient(f, dx, policy=EVEN):
    """Second-order centered derivative; the result carries the flipped parity."""
    f = _as_field(f, policy)
    e = f.extended(1)
    return Field((e[2:] - e[:-2]) / (2 * dx), _FLIP[f.policy])


def divergence(g, dx, policy=ODD):
    # in 1D divergence and gradient share the stencil
    return gradient(g, dx, policy)


def laplacian(f, dx, policy=EVEN):
    """div(grad f) with the wide centered stencil."""
    return divergence(gradient(f, dx, policy), dx)


def compact_laplacian(f, dx, policy=EVEN):
    f = _as_field(f, policy)
    e = f.extended(1)
    return Field((e[2:] - 2 * e[1:-1] + e[:-2]) / dx**2, f.policy)


def norms(f, dx, gamma=2.0):
    """Midpoint-rule L1, L2, L^gamma and sup norms of a field (or difference array)."""
    v = f.values if isinstance(f, Field) else np.asarray(f, dtype=float)
    a = np.abs(v)
    return {
        "L1": float(np.sum(a) * dx),
        "L2": float(np.sqrt(np.sum(a**2) * dx)),
        "Lgamma": float((np.sum(a**gamma) * dx) ** (1.0 / gamma)),
        "Linf": float(np.max(a)) if a.size else 0.0,
    }


def integrate(values, dx):
    return float(np.sum(values) * dx)


# -- fourth-order stencils (reference solver) ---------------------------------

def d1_4th(ext, dx, n_ghost=2):
    """Fourth-order first derivative from an array padded with ``n_ghost`` cells."""
    g = n_ghost
    n = len(ext) - 2 * g
    e = ext
    return (e[g - 2:g - 2 + n] - 8 * e[g - 1:g - 1 + n] + 8 * e[g + 1:g + 1 + n]
            - e[g + 2:g + 2 + n]) / (12 * dx)


def d2_4th(ext, dx, n_ghost=2):
    g = n_ghost
    n = len(ext) - 2 * g
    e = ext
    return (-e[g - 2:g - 2 + n] + 16 * e[g - 1:g - 1 + n] - 30 * e[g:g + n]
            + 16 * e[g + 1:g + 1 + n] - e[g + 2:g + 2 + n]) / (12 * dx**2)


def restrict(values, factor, policy=EVEN):
    """Map fine cell values onto the grid ``factor`` times coarser.

    Odd factors nest cell centers, so restriction is injection.  Even factors
    place each coarse center midway between two fine centers; a four-point
    midpoint interpolation keeps the transfer fourth-order accurate.
    """
    v = np.asarray(values, dtype=float)
    if factor == 1:
        return v.copy()
    n_coarse = len(v) // factor
    if factor % 2 == 1:
        return v[factor // 2::factor][:n_coarse].copy()
    e = extend(v, policy, 2)
    j = np.arange(n_coarse) * factor + factor // 2 - 1 + 2
    return (-e[j - 1] + 9 * e[j] + 9 * e[j + 1] - e[j + 2]) / 16
