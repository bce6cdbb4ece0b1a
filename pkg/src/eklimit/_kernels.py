"""Compiled inner loops for the Euler-Korteweg finite-volume scheme."""

import math

import numpy as np
from numba import njit

RECON_CONSTANT = 0
RECON_LINEAR = 1
RECON_MINMOD = 2
RECON_MC = 3

RECONSTRUCTIONS = {
    "constant": RECON_CONSTANT,
    "linear": RECON_LINEAR,
    "minmod": RECON_MINMOD,
    "mc": RECON_MC,
}

NG = 2


@njit(cache=True, inline="always")
def _pow(x, e):
    if e == 1.0:
        return x
    if e == 0.0:
        return 1.0
    if e == 0.5:
        return math.sqrt(x)
    if e == 2.0:
        return x * x
    if e == 1.5:
        return x * math.sqrt(x)
    return x**e


@njit(cache=True, inline="always")
def _slope(dm, dp, recon):
    if recon == RECON_LINEAR:
        return 0.5 * (dm + dp)
    if recon == RECON_CONSTANT:
        return 0.0
    if dm * dp <= 0.0:
        return 0.0
    s = 1.0 if dm > 0 else -1.0
    if recon == RECON_MINMOD:
        return s * min(abs(dm), abs(dp))
    # monotonized central
    return s * min(0.5 * abs(dm + dp), 2.0 * abs(dm), 2.0 * abs(dp))


@njit(cache=True)
def fill_ghosts(rho, J, floor, re, Je):
    """Even extension for the density, odd for the momentum; density floored."""
    n = rho.shape[0]
    for i in range(n):
        re[i + NG] = max(rho[i], floor)
        Je[i + NG] = J[i]
    for k in range(NG):
        re[NG - 1 - k] = re[NG + k]
        Je[NG - 1 - k] = -J[k]
        re[n + NG + k] = re[n + NG - 1 - k]
        Je[n + NG + k] = -J[n - 1 - k]


@njit(cache=True)
def hyperbolic_fluxes(re, Je, gamma, recon, floor, fm, fp):
    """Rusanov face fluxes from ghost-extended (rho, J); walls carry no mass flux."""
    n = re.shape[0] - 2 * NG
    gm1 = gamma - 1.0
    for k in range(n + 1):
        a = k + 1
        b = k + 2
        sa_r = _slope(re[a] - re[a - 1], re[a + 1] - re[a], recon)
        sa_j = _slope(Je[a] - Je[a - 1], Je[a + 1] - Je[a], recon)
        sb_r = _slope(re[b] - re[b - 1], re[b + 1] - re[b], recon)
        sb_j = _slope(Je[b] - Je[b - 1], Je[b + 1] - Je[b], recon)
        rl = max(re[a] + 0.5 * sa_r, floor)
        jl = Je[a] + 0.5 * sa_j
        rr = max(re[b] - 0.5 * sb_r, floor)
        jr = Je[b] - 0.5 * sb_j
        ul = jl / rl
        ur = jr / rr
        pl = _pow(rl, gm1)
        pr = _pow(rr, gm1)
        s = max(abs(ul) + math.sqrt(gamma * pl), abs(ur) + math.sqrt(gamma * pr))
        fm[k] = 0.5 * (jl + jr) - 0.5 * s * (rr - rl)
        fp[k] = 0.5 * (jl * ul + rl * pl + jr * ur + rr * pr) - 0.5 * s * (jr - jl)
    fm[0] = 0.0
    fm[n] = 0.0


@njit(cache=True)
def korteweg_stress(re, dx, alpha, c_alpha, Kc, lap, sigma):
    """Face values of Lap K(rho) - K''(rho)|rho_x|^2 / 2 - |beta(rho)_x|^2.

    ``re`` is the even-extended, floored density.  beta, K and K'' are all
    powers of rho, so one power per cell suffices: K = (2 + alpha) beta^2 / 4
    and K'' = (1 + alpha)(2 + alpha) K / rho^2.
    """
    m = re.shape[0]
    n = m - 2 * NG
    hb = 0.5 * (2.0 + alpha)
    cb = 2.0 * math.sqrt(c_alpha) / (2.0 + alpha)
    for i in range(m):
        Kc[i] = cb * _pow(re[i], hb)      # beta, temporarily
    # sigma holds beta differences first, then the full stress
    for k in range(n + 1):
        bx = (Kc[k + 2] - Kc[k + 1]) / dx
        sigma[k] = -bx * bx
    q = 0.25 * (2.0 + alpha)
    for i in range(m):
        Kc[i] = q * Kc[i] * Kc[i]
    for i in range(1, m - 1):
        lap[i] = (Kc[i + 1] - 2.0 * Kc[i] + Kc[i - 1]) / (dx * dx)
    c2 = (1.0 + alpha) * (2.0 + alpha)
    for k in range(n + 1):
        a = k + 1
        b = k + 2
        sigma[k] += 0.5 * (lap[a] + lap[b])
        if c2 != 0.0:
            rx = (re[b] - re[a]) / dx
            k2 = 0.5 * c2 * (Kc[a] / (re[a] * re[a]) + Kc[b] / (re[b] * re[b]))
            sigma[k] -= 0.5 * k2 * rx * rx


@njit(cache=True)
def ek_rhs_ws(rho, J, dx, gamma, alpha, c_alpha, eps, recon, floor,
              re, Je, fm, fp, Kc, lap, sigma, drho, dJ):
    n = rho.shape[0]
    fill_ghosts(rho, J, floor, re, Je)
    hyperbolic_fluxes(re, Je, gamma, recon, floor, fm, fp)
    e2 = eps * eps
    if e2 > 0.0:
        korteweg_stress(re, dx, alpha, c_alpha, Kc, lap, sigma)
        for i in range(n):
            drho[i] = -(fm[i + 1] - fm[i]) / dx
            dJ[i] = (-(fp[i + 1] - fp[i]) + e2 * (sigma[i + 1] - sigma[i])) / dx
    else:
        for i in range(n):
            drho[i] = -(fm[i + 1] - fm[i]) / dx
            dJ[i] = -(fp[i + 1] - fp[i]) / dx


@njit(cache=True)
def ek_rhs(rho, J, dx, gamma, alpha, c_alpha, eps, recon, floor, drho, dJ):
    n = rho.shape[0]
    m = n + 2 * NG
    ek_rhs_ws(rho, J, dx, gamma, alpha, c_alpha, eps, recon, floor,
              np.empty(m), np.empty(m), np.empty(n + 1), np.empty(n + 1),
              np.empty(m), np.empty(m), np.empty(n + 1), drho, dJ)


@njit(cache=True)
def hyperbolic_tendency(rho, J, dx, gamma, recon, floor, drho, dJ):
    n = rho.shape[0]
    m = n + 2 * NG
    re = np.empty(m)
    Je = np.empty(m)
    fm = np.empty(n + 1)
    fp = np.empty(n + 1)
    fill_ghosts(rho, J, floor, re, Je)
    hyperbolic_fluxes(re, Je, gamma, recon, floor, fm, fp)
    for i in range(n):
        drho[i] = -(fm[i + 1] - fm[i]) / dx
        dJ[i] = -(fp[i + 1] - fp[i]) / dx


@njit(cache=True)
def korteweg_tendency(rho, dx, alpha, c_alpha, eps, floor, dJ):
    n = rho.shape[0]
    m = n + 2 * NG
    re = np.empty(m)
    Je = np.zeros(m)
    fill_ghosts(rho, np.zeros(n), floor, re, Je)
    sigma = np.empty(n + 1)
    korteweg_stress(re, dx, alpha, c_alpha, np.empty(m), np.empty(m), sigma)
    e2 = eps * eps
    for i in range(n):
        dJ[i] = e2 * (sigma[i + 1] - sigma[i]) / dx


@njit(cache=True)
def stable_dt(rho, J, dx, gamma, alpha, c_alpha, eps, floor):
    """Acoustic and dispersive step bounds (before the Courant factor)."""
    amax = 0.0
    rmax = 0.0
    for i in range(rho.shape[0]):
        r = max(rho[i], floor)
        a = abs(J[i] / r) + math.sqrt(gamma * _pow(r, gamma - 1.0))
        if a > amax:
            amax = a
        if r > rmax:
            rmax = r
    # mu'(rho) = sqrt(c) rho^((1 + alpha)/2) is monotone in rho
    if alpha >= -1.0:
        mumax = math.sqrt(c_alpha) * _pow(rmax, 0.5 * (1.0 + alpha))
    dd = math.inf
    if eps > 0.0:
        dd = dx * dx / (math.pi**2 * eps * mumax)
    return dx / amax, dd


@njit(cache=True)
def ssp_rk3_step(rho, J, comp_r, comp_j, dt, dx, gamma, alpha, c_alpha, eps, recon, floor):
    """One Shu-Osher SSP-RK3 step, in place, written in increment form.

    Stage states are rho + delta; the final increment is added with Kahan
    compensation (``comp_r``, ``comp_j`` persist between steps) so the discrete
    mass stays constant to round-off over long runs.  Returns the number of
    cells clamped at the vacuum floor.
    """
    n = rho.shape[0]
    m = n + 2 * NG
    re = np.empty(m)
    Je = np.empty(m)
    fm = np.empty(n + 1)
    fp = np.empty(n + 1)
    Kc = np.empty(m)
    lap = np.empty(m)
    sigma = np.empty(n + 1)
    kr = np.empty(n)
    kj = np.empty(n)
    dr = np.empty(n)
    dj = np.empty(n)
    sr = np.empty(n)
    sj = np.empty(n)
    hits = 0

    ek_rhs_ws(rho, J, dx, gamma, alpha, c_alpha, eps, recon, floor,
              re, Je, fm, fp, Kc, lap, sigma, kr, kj)
    for i in range(n):
        dr[i] = dt * kr[i]
        dj[i] = dt * kj[i]
        sr[i] = rho[i] + dr[i]
        sj[i] = J[i] + dj[i]
        if sr[i] < floor:
            hits += 1
    ek_rhs_ws(sr, sj, dx, gamma, alpha, c_alpha, eps, recon, floor,
              re, Je, fm, fp, Kc, lap, sigma, kr, kj)
    for i in range(n):
        dr[i] = 0.25 * (dr[i] + dt * kr[i])
        dj[i] = 0.25 * (dj[i] + dt * kj[i])
        sr[i] = rho[i] + dr[i]
        sj[i] = J[i] + dj[i]
        if sr[i] < floor:
            hits += 1
    ek_rhs_ws(sr, sj, dx, gamma, alpha, c_alpha, eps, recon, floor,
              re, Je, fm, fp, Kc, lap, sigma, kr, kj)
    for i in range(n):
        y = 2.0 / 3.0 * (dr[i] + dt * kr[i]) - comp_r[i]
        s = rho[i] + y
        comp_r[i] = (s - rho[i]) - y
        rho[i] = s
        y = 2.0 / 3.0 * (dj[i] + dt * kj[i]) - comp_j[i]
        s = J[i] + y
        comp_j[i] = (s - J[i]) - y
        J[i] = s
        if rho[i] < floor:
            rho[i] = floor
            comp_r[i] = 0.0
            hits += 1
    return hits


@njit(cache=True)
def all_finite(rho, J):
    for i in range(rho.shape[0]):
        if not (math.isfinite(rho[i]) and math.isfinite(J[i])):
            return False
    return True


@njit(cache=True)
def advance(rho, J, comp_r, comp_j, t, t_stop, dx, gamma, alpha, c_alpha, eps,
            recon, floor, cfl):
    """Step until ``t_stop`` (last step shortened).  Returns (t, steps, hits, ok)."""
    steps = 0
    hits = 0
    while t < t_stop - 1e-14 * max(1.0, abs(t_stop)):
        da, dd = stable_dt(rho, J, dx, gamma, alpha, c_alpha, eps, floor)
        dt = cfl * min(da, dd)
        if t + dt > t_stop:
            dt = t_stop - t
        hits += ssp_rk3_step(rho, J, comp_r, comp_j, dt, dx, gamma, alpha, c_alpha,
                             eps, recon, floor)
        t += dt
        steps += 1
        if not all_finite(rho, J):
            return t, steps, hits, False
    return t, steps, hits, True
