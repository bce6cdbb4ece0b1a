"""
Experiment drivers behind the CLI commands.

Each driver returns plain dicts and lists so results can cross process
boundaries and be written as CSV/JSON without further conversion.
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .. import boundary_layer as bl
from .. import ek, entropy, euler, gn, nls
from ..grid import Grid1D
from ..state import StateFunctions
from .config import ConfigError, grid_cells

log = logging.getLogger(__name__)

DISTANCES = ("dist_L1", "dist_Lgamma", "dist_Lambda", "dist_gradbeta", "dist_J_L1")


def state_for(cfg, epsilon):
    return StateFunctions(cfg["model.gamma"], cfg["model.alpha"], cfg["model.c_alpha"], epsilon)


def initial_data(cfg, x):
    """Reference initial data (rho_E0, u_E0) of the configured preset at points x."""
    preset = cfg["data.preset"]
    if preset == "constant":
        return np.ones_like(x), np.zeros_like(x)
    rho = 1.0 + cfg["data.amplitude"] * np.cos(np.pi * x)
    if preset == "cosine-bump":
        return rho, np.zeros_like(x)
    return rho, cfg["data.velocity"] * np.sin(np.pi * x)


def capillary_data(cfg, x):
    """Initial data of the capillary run: the reference data, or a fixed
    density perturbation of it when the data are not well prepared."""
    rho, u = initial_data(cfg, x)
    if not cfg["sweep.well_prepared"]:
        rho = rho + cfg["data.perturbation"] * np.cos(2 * np.pi * x)
    return rho, u


def layer_exponent(cfg):
    alpha = cfg["model.alpha"]
    s = cfg["boundary_layer.s"]
    s = bl.default_s(alpha) if s == "auto" else float(s)
    try:
        bl.check_s(s, alpha)
    except bl.LayerConfigError as exc:
        raise ConfigError(str(exc)) from None
    return s


def run_case(cfg, epsilon):
    """One capillary run against its Euler reference, with the entropy series.

    Raises ConfigError when tau is outside the reference window or the layer
    parameters are inadmissible.
    """
    state = state_for(cfg, epsilon)
    n = grid_cells(cfg, epsilon)
    grid = Grid1D(n_cells=n)
    fine = grid.refined(cfg["reference.factor"])
    tau = cfg["sweep.tau"]
    margin = cfg["reference.margin"]
    times = np.linspace(0.0, tau, cfg["solver.samples"] + 1)
    s = layer_exponent(cfg)
    c = cfg["boundary_layer.c"]
    delta = bl.layer_width(epsilon, s)
    if not c * delta < 0.5 * grid.length:
        raise ConfigError(f"c*delta={c * delta:g} overlaps the domain midpoint")

    rho_f, u_f = initial_data(cfg, fine.x)
    ref_run = euler.run_reference(state, fine, rho_f, u_f, tau / margin, times,
                                  cfl=cfg["reference.cfl"], blowup_factor=cfg["reference.blowup_factor"],
                                  floor=cfg["solver.vacuum_floor"])
    try:
        ref_run.require(tau, margin)
    except euler.WindowError as exc:
        raise ConfigError(f"epsilon={epsilon:g}: {exc}") from None

    rho0, u0 = capillary_data(cfg, grid.x)
    conf = ek.EKConfig(state, grid, cfl=cfg["solver.cfl"], t_end=tau,
                       vacuum_floor=cfg["solver.vacuum_floor"],
                       reconstruction=cfg["solver.reconstruction"])
    traj = ek.run(conf, rho0, rho0 * u0, sample_times=times)

    report = entropy.EntropyReport(epsilon, n)
    wall = 0.0
    for f in traj.snapshots:
        snap = ref_run.at(f.t)
        ref = euler.EulerReference.from_snapshot(snap, state, grid)
        layer = bl.build_vbl(snap, state, c, delta, grid, s)
        wall = max(wall, *(abs(w) for w in layer.wall_mismatch()))
        report.add(f, ref, layer)
    check = entropy.gronwall_check(report, grid.dx, tol_factor=cfg["entropy.tol_factor"])

    last = report.rows[-1]
    first = report.rows[0]
    summary = {
        "epsilon": epsilon,
        "n_cells": n,
        "s": s,
        "c": c,
        "delta": delta,
        "tau": tau,
        "t_reached": float(traj.times[-1]),
        "complete": not traj.aborted,
        "message": traj.message,
        "steps": traj.steps,
        "floor_hits": traj.floor_hits,
        "window_end": ref_run.t_window,
        "mass_drift": traj.mass_drift(),
        "energy_drift": traj.energy_drift(),
        "E0": first["E"],
        "E0_capillary": 0.5 * epsilon**2 * float(np.sum(traj.snapshots[0].grad_beta ** 2) * grid.dx),
        "E_h0": first["E_h"],
        "E_tau": last["E"],
        "E_h_tau": last["E_h"],
        "max_wall_mismatch": wall,
        "R_bl_max": float(np.max(np.abs(report.column("R_bl")))),
        "R_h_direct_gap": float(np.max(np.abs(report.column("R_h") - report.column("R_h_direct")))
                                / max(float(np.max(np.abs(report.column("R_h_direct")))), 1e-300)),
    }
    for k in DISTANCES:
        summary[k] = last[k]
    for k in ("tol", "tol_h", "min_margin", "min_margin_h", "min_margin_h_direct", "ok", "ok_h", "C_fit", "C_fit_h",
              "max_half_gap", "ok_half", "min_envelope_margin"):
        summary[k] = check[k]
    series = report.table()
    return {"summary": summary, "series": series}


def _run_case_args(args):
    return run_case(*args)


def sweep(cfg, serial=False):
    """Run every epsilon of the sweep and fit convergence orders.

    Runs go to a process pool unless ``serial``; results are always
    assembled in the configured epsilon order.
    """
    eps = list(cfg["sweep.epsilons"])
    jobs = [(cfg, e) for e in eps]
    if serial or len(eps) == 1:
        results = [run_case(*j) for j in jobs]
    else:
        workers = min(len(eps), os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_case_args, jobs))
    rows = [r["summary"] for r in results]
    fits = {}
    checks = {}
    for k in DISTANCES:
        vals = [r[k] for r in rows]
        fits[k] = fit_order(eps, vals)
        checks[f"monotone_{k}"] = all(b < a for a, b in zip(vals, vals[1:]))
        checks[f"decay_{k}"] = float(vals[-1] / vals[0]) if vals[0] > 0 else float("nan")
    fits["R_bl_max"] = fit_order(eps, [r["R_bl_max"] for r in rows])
    cf = [r["C_fit"] for r in rows]
    checks["C_fit_spread"] = float(max(cf) / min(cf)) if min(cf) > 0 else float("nan")
    checks["gronwall_ok"] = all(r["ok"] for r in rows)
    checks["gronwall_h_ok"] = all(r["ok_h"] for r in rows)
    checks["complete"] = all(r["complete"] for r in rows)
    return {"rows": rows, "fits": fits, "checks": checks,
            "series": [r["series"] for r in results]}


def fit_order(eps, values):
    """Least-squares slope of log(value) against log(eps), with R^2."""
    x = np.log(np.asarray(eps, dtype=float))
    y = np.asarray(values, dtype=float)
    if len(x) < 2 or np.any(y <= 0):
        return {"order": float("nan"), "r2": float("nan")}
    y = np.log(y)
    slope, icept = np.polyfit(x, y, 1)
    resid = y - (slope * x + icept)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return {"order": float(slope), "r2": r2}


# -- nls oracle ---------------------------------------------------------------

def nls_compare(cfg):
    """Capillary runs on the configured grids against one NLS oracle run."""
    eps = cfg["nls.epsilon"]
    t_end = cfg["nls.t_end"]
    state = StateFunctions.qhd(eps, gamma=2.0)
    n_or = cfg["nls.oracle_cells"]
    xw = (np.arange(n_or) + 0.5) / n_or
    rho_w, u_w = initial_data(cfg, xw)
    times = [0.0, 0.5 * t_end, t_end]
    wave = nls.run(nls.wave_from_hydro(rho_w, u_w, eps), t_end, cfg["nls.dt"], times,
                   vacuum_floor=cfg["solver.vacuum_floor"])
    rows = []
    for n in cfg["nls.cells"]:
        grid = Grid1D(n_cells=n)
        rho0, u0 = initial_data(cfg, grid.x)
        conf = ek.EKConfig(state, grid, cfl=cfg["solver.cfl"], t_end=t_end,
                           vacuum_floor=cfg["solver.vacuum_floor"],
                           reconstruction=cfg["solver.reconstruction"])
        traj = ek.run(conf, rho0, rho0 * u0, sample_times=times)
        # E relative to the initial data, evaluated on both field sets
        for r in nls.oracle_compare(traj, wave, entropy_ref=lambda t: (rho0, u0)):
            rows.append({"n_cells": n, **r})
    final = [r for r in rows if abs(r["t"] - t_end) < 1e-12]
    ratios = [a["rho_L2"] / b["rho_L2"] if b["rho_L2"] > 0 else float("nan")
              for a, b in zip(final, final[1:])]
    return {"rows": rows, "ratios": ratios, "mass_drift": wave.mass_drift(),
            "energy_drift": wave.energy_drift(), "vacuum": wave.vacuum,
            "oracle_cells": n_or, "steps": wave.steps}


# -- GN ratios ----------------------------------------------------------------

def gn_check(cfg, seed=0):
    rows = []
    for d in cfg["gn.dims"]:
        for a in cfg["gn.alphas"]:
            rows.append(gn.sweep(d, a, cfg["gn.draws"], seed=seed))
    # the degenerate alpha = -1 case on one fixed 1d field
    p = gn.random_bumps(np.random.default_rng(seed))
    degenerate = gn.gn_ratio(gn.bump_field(p, gn.DEFAULT_CELLS[1], 1), 1.0 / gn.DEFAULT_CELLS[1], -1.0)
    return {"rows": rows, "degenerate_ratio": degenerate}
