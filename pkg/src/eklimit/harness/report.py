"""
CSV, JSON and SVG writers with byte-stable output.

Floats are written with ``repr`` (shortest round-trip form); non-finite
values become empty CSV cells and JSON nulls.  SVG files use a fixed hash
salt and no timestamp so repeated runs produce identical bytes.
"""

import csv
import json
import math
import os

import numpy as np


def _plain(v):
    """Convert numpy scalars/arrays to plain Python values; NaN/inf to None."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_plain(payload), fh, indent=2, allow_nan=False)
        fh.write("\n")


def _cell(v):
    v = _plain(v)
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def dict_rows(rows, keys=None):
    keys = list(rows[0].keys()) if keys is None and rows else (keys or [])
    return keys, [[r.get(k) for k in keys] for r in rows]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "eklimit"
    matplotlib.rcParams["svg.fonttype"] = "path"
    return plt


def line_plot(path, series, xlabel, ylabel, loglog=False, title=None):
    """``series`` maps a label to (x, y); saved as SVG without a timestamp."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (x, y) in series.items():
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if loglog:
            ok = (x > 0) & (y > 0)
            ax.loglog(x[ok], y[ok], "o-", label=label)
        else:
            ax.plot(x, y, "-", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
