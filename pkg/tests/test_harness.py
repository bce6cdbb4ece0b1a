import json
import logging

import numpy as np
import pytest

from eklimit import entropy
from eklimit.harness import cli, config, experiments, identities
from eklimit.harness.config import ConfigError

SMALL = """
data.preset = cosine-bump
sweep.epsilons = 0.1, 0.07, 0.05
sweep.tau = 0.05
grid.n_base = 64
solver.samples = 10
"""


def _write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# -- configuration ------------------------------------------------------------

def test_defaults_validate():
    cfg = config.load()
    assert cfg["data.preset"] == "cosine-bump"
    assert list(config.echo(cfg)) == list(config.SCHEMA)


def test_parse_values_and_comments():
    cfg = config.parse("data.preset = traveling-bump  # moving\n\nsweep.epsilons = 0.2, 0.1, 0.05\n"
                       "sweep.well_prepared = no\nboundary_layer.s = 0.3\n")
    assert cfg["sweep.epsilons"] == [0.2, 0.1, 0.05]
    assert cfg["sweep.well_prepared"] is False
    assert cfg["boundary_layer.s"] == 0.3


@pytest.mark.parametrize("text", [
    "data.preset = cosine-bump\nsolver.order = 2\n",             # unknown key
    "data.preset = cosine-bump\ndata.preset = constant\n",        # duplicate
    "grid.n_base = 64\n",                                         # missing required key
    "data.preset = cosine-bump\ngrid.n_base = many\n",            # bad type
    "data.preset = vortex\n",                                     # bad choice
    "data.preset = cosine-bump\nsweep.epsilons = 0.05, 0.1\n",    # not decreasing
    "data.preset = cosine-bump\nsolver.cfl = 1.0\n",              # out of range
    "data.preset cosine-bump\n",                                  # malformed line
])
def test_parse_rejects(text):
    with pytest.raises(ConfigError):
        config.parse(text)


def test_grid_cells_scale_with_epsilon():
    cfg = config.defaults()
    assert config.grid_cells(cfg, 0.1) == 256
    assert config.grid_cells(cfg, 0.025) == 1024
    assert config.grid_cells(cfg, 1e-6) == cfg["grid.n_max"]
    assert config.grid_cells(cfg, 10.0) == cfg["grid.n_min"]


def test_load_missing_file():
    with pytest.raises(ConfigError):
        config.load("/nonexistent/eklimit.cfg")


# -- exit codes -----------------------------------------------------------------

def test_cli_config_errors_exit_2(tmp_path):
    assert cli.main(["simulate", "--config", _write(tmp_path, "data.preset = x\n"),
                     "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["simulate", "--config", _write(tmp_path, "grid.n_base = 64\n"),
                     "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["sweep", "--config", _write(tmp_path, "data.preset = constant\nsweep.epsilons = 0.1, 0.05\n"),
                     "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["check-identities", "--count", "-1", "--out", str(tmp_path / "o")]) == 2


def test_inadmissible_layer_exponent_exits_2(tmp_path):
    cfg = _write(tmp_path, SMALL + "boundary_layer.s = 0.6\n")
    assert cli.main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_tau_beyond_window_exits_2(tmp_path, caplog):
    cfg = _write(tmp_path, SMALL.replace("sweep.tau = 0.05", "sweep.tau = 5.0")
                 + "reference.blowup_factor = 2\n")
    assert cli.main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "T_window" in caplog.text


def test_constant_state_has_zero_distances(tmp_path):
    cfg = _write(tmp_path, SMALL.replace("cosine-bump", "constant"))
    out = tmp_path / "o"
    assert cli.main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    s = json.loads((out / "summary.json").read_text())["summary"]
    for k in experiments.DISTANCES:
        assert s[k] == 0.0
    assert s["E_tau"] == 0.0 and s["max_wall_mismatch"] == 0.0


def test_simulate_outputs(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["simulate", "--config", _write(tmp_path, SMALL), "--out", str(out)]) == 0
    lines = (out / "series.csv").read_text().splitlines()
    assert lines[0].split(",") == list(entropy.SERIES_FIELDS)
    assert len(lines) == 12
    assert (out / "entropy.svg").read_text().startswith("<?xml")
    doc = json.loads((out / "summary.json").read_text())
    assert doc["config"]["grid.n_base"] == 64
    assert doc["summary"]["ok"] and doc["summary"]["ok_h"]


def test_violated_inequality_exits_1(tmp_path, monkeypatch):
    real = entropy.remainder_Rh

    def shifted(flow, ref, bl):
        out = dict(real(flow, ref, bl))
        out["R_h"] -= 1.0
        return out

    monkeypatch.setattr(entropy, "remainder_Rh", shifted)
    assert cli.main(["simulate", "--config", _write(tmp_path, SMALL), "--out", str(tmp_path / "o")]) == 1


# -- identity suite -------------------------------------------------------------

def test_identity_count_zero_passes_vacuously(tmp_path, caplog):
    with caplog.at_level(logging.WARNING):
        assert cli.main(["check-identities", "--count", "0", "--out", str(tmp_path)]) == 0
    assert "vacuously" in caplog.text
    assert json.loads((tmp_path / "identities.json").read_text())["count"] == 0


def test_identity_suite_catches_tampered_beta():
    _, ok = identities.check_identities(seed=0, count=10)
    assert ok
    rows, ok = identities.check_identities(seed=0, count=10, beta_factor=1.001)
    assert not ok
    failed = {r["identity"] for r in rows if not r["passed"]}
    assert "beta_squared_k" in failed and "energy_beta_vs_k" in failed


def test_identity_failure_exits_1(tmp_path, monkeypatch):
    real = identities.check_identities
    monkeypatch.setattr(identities, "check_identities",
                        lambda seed=0, count=100: real(seed, count, beta_factor=1.001))
    assert cli.main(["check-identities", "--count", "3", "--out", str(tmp_path)]) == 1
    doc = json.loads((tmp_path / "identities.json").read_text())
    assert doc["failures"] and doc["failures"][0]["draw"] == 0


def test_identity_draws_reproducible():
    a, _ = identities.check_identities(seed=5, count=3)
    b, _ = identities.check_identities(seed=5, count=3)
    assert a == b


# -- sweep, GN, NLS ---------------------------------------------------------------

def test_parallel_sweep_matches_serial(tmp_path):
    cfg = _write(tmp_path, SMALL)
    a, b = tmp_path / "serial", tmp_path / "parallel"
    assert cli.main(["sweep", "--serial", "--config", cfg, "--out", str(a)]) == 0
    assert cli.main(["sweep", "--config", cfg, "--out", str(b)]) == 0
    for name in ("sweep.csv", "sweep.json", "series_0.csv", "series_2.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_fit_order():
    eps = np.array([0.1, 0.05, 0.025])
    fit = experiments.fit_order(eps, 3 * eps**2)
    assert fit["order"] == pytest.approx(2.0) and fit["r2"] == pytest.approx(1.0)


def test_gn_check_command(tmp_path):
    cfg = _write(tmp_path, "data.preset = constant\ngn.dims = 1, 2\ngn.alphas = 0.0\ngn.draws = 3\n")
    assert cli.main(["gn-check", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    doc = json.loads((tmp_path / "o" / "gn.json").read_text())
    assert len(doc["rows"]) == 2 and doc["degenerate_ratio"] == 1.0


def test_nls_compare_command(tmp_path):
    cfg = _write(tmp_path, "data.preset = cosine-bump\nnls.cells = 32, 64\nnls.oracle_cells = 64\n"
                           "nls.t_end = 0.05\nnls.dt = 1e-4\n")
    assert cli.main(["nls-compare", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    doc = json.loads((tmp_path / "o" / "nls.json").read_text())
    assert doc["mass_drift"] < 1e-12
    assert len(doc["ratios"]) == 1 and doc["ratios"][0] > 2
