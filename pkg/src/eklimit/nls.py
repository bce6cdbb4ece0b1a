"""
Semiclassical NLS oracle for the quantum-hydrodynamic case.

    i eps psi_t = -eps^2/2 psi_xx + gamma/(gamma-1) |psi|^(2(gamma-1)) psi

on [0, 1] with psi_x = 0 at the walls.  The wave function is stored at the
cell centers x_j = (j + 1/2)/N and expanded in cos(pi k x), so the Neumann
condition holds by construction.  Time stepping is Strang splitting: the
linear part is exact in the cosine basis and the nonlinear part is an exact
phase rotation, so each step is unitary.

Through (rho, J) = (|psi|^2, eps Im(conj(psi) psi_x)) an NLS run gives an
independent solution of the capillary system with k(rho) = 1/(4 rho).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct, dst, idct


@dataclass
class WaveState:
    psi: np.ndarray
    epsilon: float
    gamma: float = 2.0
    t: float = 0.0

    @property
    def n(self):
        return len(self.psi)

    @property
    def x(self):
        return (np.arange(self.n) + 0.5) / self.n


def cosine_coefficients(f):
    """Coefficients c_k with f(x_j) = sum_k c_k cos(pi k x_j)."""
    c = dct(f, type=2) / len(f)
    c[0] *= 0.5
    return c


def evaluate(f, x):
    """Evaluate the cosine interpolant of cell-center samples ``f`` at points ``x``."""
    c = cosine_coefficients(f)
    k = np.arange(len(f))
    return np.cos(np.pi * np.outer(np.asarray(x, dtype=float), k)) @ c


def derivative(f):
    """Spectral x-derivative of a cosine series, returned at the cell centers."""
    n = len(f)
    c = cosine_coefficients(f)
    k = np.arange(n)
    b = np.zeros(n, dtype=c.dtype)
    b[:-1] = -0.5 * np.pi * k[1:] * c[1:]
    return dst(b, type=3)


def second_derivative(f):
    """Spectral second derivative of a cosine series at the cell centers."""
    n = len(f)
    k = np.arange(n)
    return idct(dct(f, type=2) * -(np.pi * k) ** 2, type=2)


def sine_derivative(g):
    """Spectral x-derivative of a field that vanishes at the walls (sine series)."""
    n = len(g)
    s = dst(g, type=2) / n      # s[k-1] multiplies sin(pi k x)
    s[-1] *= 0.5
    k = np.arange(1, n + 1)
    c = np.zeros(n, dtype=s.dtype)
    c[1:] = np.pi * k[:-1] * s[:-1]
    # the k = N sine mode differentiates to cos(pi N x), which vanishes at cell centers
    return idct(c * n, type=2)


def odd_mode_content(psi):
    """Largest sine coefficient of the even 2-periodic extension (zero for Neumann data)."""
    ext = np.concatenate([psi, psi[::-1]])
    m = len(ext)
    k = np.fft.fftfreq(m, 1.0 / m)
    # shift by half a cell so the reflection point sits at x = 0; then the
    # sine part of mode k is (A_-k - A_k) / 2i
    A = np.fft.fft(ext) * np.exp(-1j * np.pi * k / m) / m
    return float(np.max(np.abs(A[(-np.arange(m)) % m] - A)) / 2)


def linear_multiplier(n, epsilon, dt):
    k = np.arange(n)
    return np.exp(-0.5j * dt * epsilon * (np.pi * k) ** 2)


def _nonlinear_phase(psi, epsilon, gamma, dt):
    rho = np.abs(psi) ** 2
    return psi * np.exp(-1j * dt * gamma / (gamma - 1) * rho ** (gamma - 1) / epsilon)


def nls_step(w: WaveState, dt, multiplier=None):
    """One Strang step: half nonlinear, exact linear, half nonlinear."""
    if multiplier is None:
        multiplier = linear_multiplier(w.n, w.epsilon, dt)
    psi = _nonlinear_phase(w.psi, w.epsilon, w.gamma, 0.5 * dt)
    psi = idct(dct(psi, type=2) * multiplier, type=2)
    psi = _nonlinear_phase(psi, w.epsilon, w.gamma, 0.5 * dt)
    return WaveState(psi, w.epsilon, w.gamma, w.t + dt)


def mass(w: WaveState):
    return float(np.sum(np.abs(w.psi) ** 2) / w.n)


def energy(w: WaveState):
    """int eps^2/2 |psi_x|^2 + f(|psi|^2) with f(rho) = rho^gamma / (gamma - 1)."""
    px = derivative(w.psi)
    rho = np.abs(w.psi) ** 2
    return float(np.sum(0.5 * w.epsilon**2 * np.abs(px) ** 2 + rho**w.gamma / (w.gamma - 1)) / w.n)


def madelung(w: WaveState):
    """Hydrodynamic fields (rho, J) = (|psi|^2, eps Im(conj(psi) psi_x))."""
    rho = np.abs(w.psi) ** 2
    J = w.epsilon * np.imag(np.conj(w.psi) * derivative(w.psi))
    return rho, J


def continuity_residual(w: WaveState):
    """Max |rho_t + J_x| with rho_t from the NLS right-hand side."""
    eps, g = w.epsilon, w.gamma
    psi = w.psi
    rho = np.abs(psi) ** 2
    psi_t = 0.5j * eps * second_derivative(psi) \
        - 1j * g / (g - 1) * rho ** (g - 1) * psi / eps
    rho_t = 2 * np.real(np.conj(psi) * psi_t)
    _, J = madelung(w)
    return float(np.max(np.abs(rho_t + sine_derivative(J))))


def phase_from_velocity(u, n):
    """Phase S with S_x = u, S(0) = 0, from cell-center samples of u.

    u is expanded in a sine series (it vanishes at the walls) and integrated
    mode by mode, so S_x = 0 at the walls exactly.
    """
    s = dst(np.asarray(u, dtype=float), type=2) / n
    s[-1] *= 0.5
    k = np.arange(1, n + 1)
    x = (np.arange(n) + 0.5) / n
    # int_0^x sin(pi k y) dy = (1 - cos(pi k x)) / (pi k)
    return ((1 - np.cos(np.pi * np.outer(x, k))) / (np.pi * k)) @ s


def wave_from_hydro(rho, u, epsilon, gamma=2.0):
    """Well-prepared wave function sqrt(rho) exp(i S / eps) with S_x = u."""
    rho = np.asarray(rho, dtype=float)
    S = phase_from_velocity(u, len(rho))
    return WaveState(np.sqrt(rho) * np.exp(1j * S / epsilon), epsilon, gamma)


@dataclass
class WaveRun:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    steps: int = 0
    vacuum: bool = False

    def mass_drift(self):
        m = np.array([mass(w) for w in self.states])
        return float(np.max(np.abs(m - m[0])) / m[0])

    def energy_drift(self):
        e = np.array([energy(w) for w in self.states])
        return float(np.max(np.abs(e - e[0])) / abs(e[0]))


def run(w0: WaveState, t_end, dt, sample_times=None, vacuum_floor=1e-10):
    """Integrate with steps of at most ``dt``, landing on every sample time.

    Stops early, with ``vacuum`` set, if the density falls below the floor.
    """
    if sample_times is None:
        sample_times = [0.0, t_end]
    out = WaveRun(times=[w0.t], states=[w0])
    w = w0
    for ts in sorted(float(t) for t in sample_times if 0 < t <= t_end):
        span = ts - w.t
        nsteps = max(1, int(np.ceil(span / dt - 1e-9)))
        h = span / nsteps
        mult = linear_multiplier(w.n, w.epsilon, h)
        for _ in range(nsteps):
            w = nls_step(w, h, mult)
        out.steps += nsteps
        w = WaveState(w.psi, w.epsilon, w.gamma, ts)
        if np.min(np.abs(w.psi) ** 2) < vacuum_floor:
            out.vacuum = True
            break
        out.times.append(ts)
        out.states.append(w)
    return out


def oracle_compare(ek_trajectory, wave_run: WaveRun, entropy_ref=None):
    """Divergence between EK snapshots and Madelung fields at shared times.

    The NLS fields are evaluated at the EK cell centers through their
    cosine/sine interpolants.  Returns rows of (t, rho_L2, J_L2) and, when
    ``entropy_ref(t)`` gives a reference (r, U) on the EK grid, the
    first-order relative entropy from both field sets.
    """
    from .ek import FlowState
    from .entropy import entropy_E

    rows = []
    waves = {round(t, 12): w for t, w in zip(wave_run.times, wave_run.states)}
    for f in ek_trajectory.snapshots:
        w = waves.get(round(f.t, 12))
        if w is None:
            continue
        x = f.grid.x
        rho_w, J_w = madelung(w)
        rho_n = np.real(evaluate(rho_w, x))
        J_n = _sine_evaluate(J_w, x)
        dx = f.grid.dx
        row = {
            "t": f.t,
            "rho_L2": float(np.sqrt(np.sum((f.rho - rho_n) ** 2) * dx)),
            "J_L2": float(np.sqrt(np.sum((f.J - J_n) ** 2) * dx)),
        }
        if entropy_ref is not None:
            r, U = entropy_ref(f.t)
            g = FlowState(rho_n, J_n, f.grid, f.state, f.t)
            row["E_ek"] = entropy_E(f, r, U)
            row["E_nls"] = entropy_E(g, r, U)
        rows.append(row)
    return rows


def _sine_evaluate(g, x):
    n = len(g)
    s = dst(np.asarray(g, dtype=float), type=2) / n
    s[-1] *= 0.5
    k = np.arange(1, n + 1)
    return np.sin(np.pi * np.outer(np.asarray(x, dtype=float), k)) @ s
