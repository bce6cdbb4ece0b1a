"""
Flat ``section.key = value`` configuration files.

Lines starting with '#' and blank lines are ignored; lists are
comma-separated.  Every key must appear in ``SCHEMA``; keys marked required
must be present whenever a file is given.
"""

import math

PRESETS = ("constant", "cosine-bump", "traveling-bump")
RECONSTRUCTIONS = ("linear", "minmod")


class ConfigError(ValueError):
    """Invalid, unknown or missing configuration entry (exit status 2)."""


def _bool(text):
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _s_value(text):
    t = text.strip().lower()
    return "auto" if t == "auto" else float(t)


# key -> (parser, default, required)
SCHEMA = {
    "model.gamma": (float, 2.0, False),
    "model.alpha": (float, -1.0, False),
    "model.c_alpha": (float, 0.25, False),
    "model.epsilon": (float, 0.1, False),
    "data.preset": (str, "cosine-bump", True),
    "data.amplitude": (float, 0.2, False),
    "data.velocity": (float, 0.3, False),
    "data.perturbation": (float, 0.01, False),
    "sweep.epsilons": (_floats, [0.1, 0.05, 0.025, 0.0125], False),
    "sweep.tau": (float, 0.2, False),
    "sweep.well_prepared": (_bool, True, False),
    "grid.n_base": (int, 256, False),
    "grid.eps_base": (float, 0.1, False),
    "grid.n_min": (int, 32, False),
    "grid.n_max": (int, 8192, False),
    "solver.cfl": (float, 0.8, False),
    "solver.reconstruction": (str, "linear", False),
    "solver.vacuum_floor": (float, 1e-10, False),
    "solver.samples": (int, 40, False),
    "reference.factor": (int, 4, False),
    "reference.cfl": (float, 0.5, False),
    "reference.blowup_factor": (float, 50.0, False),
    "reference.margin": (float, 0.9, False),
    "boundary_layer.c": (float, 1.0, False),
    "boundary_layer.s": (_s_value, "auto", False),
    "entropy.tol_factor": (float, 10.0, False),
    "nls.epsilon": (float, 0.5, False),
    "nls.t_end": (float, 0.2, False),
    "nls.cells": (_ints, [64, 128, 256, 512], False),
    "nls.oracle_cells": (int, 512, False),
    "nls.dt": (float, 2e-5, False),
    "gn.dims": (_ints, [1, 2, 3], False),
    "gn.alphas": (_floats, [-0.5, 0.0, 1.0], False),
    "gn.draws": (int, 100, False),
    "identities.count": (int, 100, False),
}


def defaults():
    return {k: (list(v[1]) if isinstance(v[1], list) else v[1]) for k, v in SCHEMA.items()}


def parse(text, require=True):
    """Parse config text into a fully resolved dict (defaults filled in)."""
    cfg = defaults()
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            cfg[key] = SCHEMA[key][0](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
        seen.add(key)
    if require:
        missing = [k for k, v in SCHEMA.items() if v[2] and k not in seen]
        if missing:
            raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    validate(cfg)
    return cfg


def load(path=None):
    if path is None:
        cfg = defaults()
        validate(cfg)
        return cfg
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse(text)


def validate(cfg):
    def need(cond, msg):
        if not cond:
            raise ConfigError(msg)

    need(cfg["model.gamma"] > 1, "model.gamma must be > 1")
    need(cfg["model.alpha"] >= -1, "model.alpha must be >= -1")
    need(cfg["model.c_alpha"] > 0, "model.c_alpha must be > 0")
    need(cfg["model.epsilon"] > 0, "model.epsilon must be > 0")
    need(cfg["data.preset"] in PRESETS, f"data.preset must be one of {', '.join(PRESETS)}")
    need(0 <= cfg["data.amplitude"] < 1, "data.amplitude must lie in [0, 1)")
    eps = cfg["sweep.epsilons"]
    need(len(eps) > 0 and all(e > 0 for e in eps), "sweep.epsilons must be positive")
    need(all(a > b for a, b in zip(eps, eps[1:])), "sweep.epsilons must be decreasing")
    need(cfg["sweep.tau"] > 0, "sweep.tau must be > 0")
    need(cfg["grid.n_min"] >= 8 and cfg["grid.n_min"] <= cfg["grid.n_max"], "grid.n_min/n_max inconsistent")
    need(cfg["grid.n_base"] >= 8, "grid.n_base must be >= 8")
    need(0 < cfg["solver.cfl"] < 1, "solver.cfl must lie in (0, 1)")
    need(cfg["solver.reconstruction"] in RECONSTRUCTIONS,
         f"solver.reconstruction must be one of {', '.join(RECONSTRUCTIONS)}")
    need(cfg["solver.samples"] >= 2, "solver.samples must be >= 2")
    need(cfg["reference.factor"] >= 1, "reference.factor must be >= 1")
    need(cfg["reference.cfl"] > 0, "reference.cfl must be > 0")
    need(cfg["reference.blowup_factor"] > 1, "reference.blowup_factor must be > 1")
    need(0 < cfg["reference.margin"] <= 1, "reference.margin must lie in (0, 1]")
    need(cfg["boundary_layer.c"] > 0, "boundary_layer.c must be > 0")
    s = cfg["boundary_layer.s"]
    need(s == "auto" or (isinstance(s, float) and math.isfinite(s)), "boundary_layer.s must be a number or auto")
    need(cfg["entropy.tol_factor"] >= 0, "entropy.tol_factor must be >= 0")
    need(cfg["nls.dt"] > 0 and cfg["nls.t_end"] > 0, "nls.dt and nls.t_end must be > 0")
    need(len(cfg["nls.cells"]) >= 2, "nls.cells needs at least two grids")
    need(all(d in (1, 2, 3) for d in cfg["gn.dims"]), "gn.dims entries must be 1, 2 or 3")
    need(cfg["gn.draws"] >= 1, "gn.draws must be >= 1")
    need(cfg["identities.count"] >= 0, "identities.count must be >= 0")


def grid_cells(cfg, epsilon):
    """Cells per unit length, proportional to 1/epsilon and clamped to [n_min, n_max]."""
    n = int(round(cfg["grid.n_base"] * cfg["grid.eps_base"] / epsilon))
    n += n % 2
    return max(cfg["grid.n_min"], min(cfg["grid.n_max"], n))


def echo(cfg):
    """Resolved configuration in schema order, for embedding in reports."""
    return {k: cfg[k] for k in SCHEMA}
