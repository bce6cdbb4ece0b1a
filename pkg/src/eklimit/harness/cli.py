"""
Command line entry point.

Exit status: 0 success, 1 numerical failure (an asserted inequality or
convergence check failed, or a run aborted), 2 configuration error.
"""

import argparse
import logging
import os
import sys

from . import config, experiments, identities, report
from .config import ConfigError

log = logging.getLogger("eklimit")

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2


def _series_plot(out, name, header, rows, keys, ylabel):
    cols = {k: [r[header.index(k)] for r in rows] for k in ["t"] + keys}
    report.line_plot(os.path.join(out, name), {k: (cols["t"], cols[k]) for k in keys}, "t", ylabel)


def cmd_simulate(cfg, out, args):
    res = experiments.run_case(cfg, cfg["model.epsilon"])
    header, rows = res["series"]
    report.write_csv(os.path.join(out, "series.csv"), header, rows)
    s = res["summary"]
    report.write_json(os.path.join(out, "summary.json"), {"command": "simulate", "config": config.echo(cfg),
                                                          "summary": s})
    _series_plot(out, "entropy.svg", header, rows, ["E", "E_h"], "relative entropy")
    ok = s["complete"] and s["ok"] and s["ok_h"]
    if not ok:
        log.error("entropy inequality violated beyond tolerance or run incomplete; "
                  "refine the grid or the sampling")
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_sweep(cfg, out, args):
    if len(cfg["sweep.epsilons"]) < 3:
        raise ConfigError("a sweep needs at least three epsilons")
    res = experiments.sweep(cfg, serial=args.serial)
    rows = res["rows"]
    keys = list(rows[0].keys())
    report.write_csv(os.path.join(out, "sweep.csv"), *report.dict_rows(rows, keys))
    for i, (header, srows) in enumerate(res["series"]):
        report.write_csv(os.path.join(out, f"series_{i}.csv"), header, srows)
    report.write_json(os.path.join(out, "sweep.json"), {
        "command": "sweep", "config": config.echo(cfg), "rows": rows,
        "fits": res["fits"], "checks": res["checks"]})
    eps = [r["epsilon"] for r in rows]
    report.line_plot(os.path.join(out, "sweep.svg"),
                     {k: (eps, [r[k] for r in rows]) for k in experiments.DISTANCES},
                     "epsilon", "distance at tau", loglog=True)
    ch = res["checks"]
    failed = [k for k, v in ch.items() if isinstance(v, bool) and not v]
    for k in failed:
        log.error("sweep check failed: %s", k)
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_check_identities(cfg, out, args):
    count = cfg["identities.count"] if args.count is None else args.count
    if count == 0:
        log.warning("count=0: no draws, identity suite passes vacuously")
    rows, ok = identities.check_identities(seed=args.seed, count=count)
    keys = ["identity", "draw", "seed", "residual", "tol", "passed"]
    report.write_csv(os.path.join(out, "identities.csv"), *report.dict_rows(rows, keys))
    failures = [r for r in rows if not r["passed"]]
    for r in failures:
        log.error("identity %s failed: draw %d (seed %d), residual %.3e > %.1e",
                  r["identity"], r["draw"], r["seed"], r["residual"], r["tol"])
    report.write_json(os.path.join(out, "identities.json"), {
        "command": "check-identities", "config": config.echo(cfg), "seed": args.seed,
        "count": count, "passed": ok, "failures": failures})
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_gn_check(cfg, out, args):
    res = experiments.gn_check(cfg, seed=args.seed)
    rows = res["rows"]
    report.write_csv(os.path.join(out, "gn.csv"), *report.dict_rows(rows))
    report.write_json(os.path.join(out, "gn.json"), {"command": "gn-check", "config": config.echo(cfg), **res})
    series = {}
    for d in sorted({r["d"] for r in rows}):
        sel = [r for r in rows if r["d"] == d]
        series[f"d={d}"] = ([r["alpha"] for r in sel], [r["max_ratio"] for r in sel])
    report.line_plot(os.path.join(out, "gn.svg"), series, "alpha", "max ratio")
    ok = all(r["finite"] for r in rows)
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_nls_compare(cfg, out, args):
    res = experiments.nls_compare(cfg)
    report.write_csv(os.path.join(out, "nls.csv"), *report.dict_rows(res["rows"]))
    report.write_json(os.path.join(out, "nls.json"), {"command": "nls-compare", "config": config.echo(cfg), **res})
    final = [r for r in res["rows"] if abs(r["t"] - cfg["nls.t_end"]) < 1e-12]
    report.line_plot(os.path.join(out, "nls.svg"),
                     {"density": ([r["n_cells"] for r in final], [r["rho_L2"] for r in final]),
                      "momentum": ([r["n_cells"] for r in final], [r["J_L2"] for r in final])},
                     "cells", "L2 divergence at t_end", loglog=True)
    if res["vacuum"]:
        log.warning("oracle reached the vacuum floor; comparison window truncated")
    ok = res["mass_drift"] <= 1e-10
    if not ok:
        log.error("oracle mass drift %.3e exceeds 1e-10", res["mass_drift"])
    return EXIT_OK if ok else EXIT_NUMERICAL


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "check-identities": cmd_check_identities,
    "gn-check": cmd_gn_check,
    "nls-compare": cmd_nls_compare,
}


def build_parser():
    p = argparse.ArgumentParser(prog="eklimit", description=__doc__.strip().splitlines()[0])
    p.add_argument("command", choices=list(COMMANDS))
    p.add_argument("--config", help="flat 'section.key = value' config file")
    p.add_argument("--out", default="eklimit-out", help="output directory")
    p.add_argument("--serial", action="store_true", help="run sweep cases sequentially")
    p.add_argument("--seed", type=int, default=0, help="seed for random draws")
    p.add_argument("--count", type=int, help="identity draws (overrides identities.count)")
    p.add_argument("--log-level", default="INFO")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config.load(args.config)
        if args.count is not None and args.count < 0:
            raise ConfigError("--count must be >= 0")
        if args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        out = report.ensure_dir(args.out)
        return COMMANDS[args.command](cfg, out, args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
