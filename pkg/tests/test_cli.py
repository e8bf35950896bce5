"""Command-line front end: subcommands, CSV output and exit codes."""

import json
import subprocess
import sys

import pytest

from optomech_epr.cli import EXIT_CONFIG, EXIT_OK, EXIT_PHYSICS, run
from optomech_epr.tables import read_csv

from test_config import BASE


def _cfg(tmp_path, **changes):
    cfg = json.loads(json.dumps(BASE))
    cfg.update(changes)
    p = tmp_path / "run.json"
    p.write_text(json.dumps(cfg))
    return str(p)


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _values(table):
    return {r[0]: r[1] for r in table.rows}


def test_spectrum_reports_s0(capsys):
    code, out, _ = _run(capsys, "spectrum", "--count", "5")
    assert code == EXIT_OK
    tab = read_csv(out)
    assert tab.columns == ("omega", "S")
    assert tab.rows[0][1] == pytest.approx(0.081633, abs=1e-6)
    assert tab.meta["S0"] == pytest.approx(0.0816326530612, rel=1e-10)


def test_steady_without_squeezing_or_coupling(capsys, tmp_path):
    cfg = _cfg(tmp_path, opo={"chi": 0.0, "kappa_c": 0.9},
               mechanics=[{"omega": 1.01, "gamma": 2e-5, "n_T": 0, "G": 0.0},
                          {"omega": 0.99, "gamma": 2e-5, "n_T": 0, "G": 0.0}])
    code, out, _ = _run(capsys, "steady", "--config", cfg)
    assert code == EXIT_OK
    vals = _values(read_csv(out))
    assert vals["E_N"] == 0.0
    assert vals["var_min"] == pytest.approx(1.0, abs=1e-12)


def test_steady_reference_and_regimes(capsys, tmp_path):
    code, out, _ = _run(capsys, "steady", "--config", _cfg(tmp_path))
    assert _values(read_csv(out))["E_N"] == pytest.approx(1.8968616084827725, rel=1e-12)
    code, out, _ = _run(capsys, "steady", "--regime", "resonant", "--log-base", "2")
    tab = read_csv(out)
    assert _values(tab)["E_N"] == pytest.approx(2.0720758187825012 / 0.6931471805599453)
    assert tab.meta["frame"] == "squeezed" and tab.meta["evaluation"]["log_base"] == 2


def test_output_is_byte_identical(capsys, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    argv = ["sweep", "--target", "omega_minus", "--start", "0", "--stop", "0.1",
            "--count", "4"]
    assert run(argv + ["--out", str(a)]) == EXIT_OK
    assert run(argv + ["--out", str(b), "--workers", "2"]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("# ")
    assert "omega_minus,E_N,var_min" in text


def test_sweep_from_config(capsys, tmp_path):
    cfg = _cfg(tmp_path, sweep={"target": "n_T", "start": 0, "stop": 20, "count": 3})
    code, out, _ = _run(capsys, "sweep", "--config", cfg)
    tab = read_csv(out)
    assert code == EXIT_OK and len(tab.rows) == 3
    E = tab.column("E_N")
    assert E[0] > E[1] > E[2]


def test_optimize(capsys, tmp_path):
    cfg = _cfg(tmp_path, optimize={"bounds": {"epsilon_L": [0.99, 1.01]}})
    code, out, _ = _run(capsys, "optimize", "--config", cfg)
    assert code == EXIT_OK
    vals = _values(read_csv(out))
    assert vals["E_N"] >= 1.8968616084827725
    assert 0.99 <= vals["epsilon_L"] <= 1.01
    code, _, err = _run(capsys, "optimize", "--config", _cfg(tmp_path))
    assert code == EXIT_CONFIG and "optimize" in err


def test_network_and_pair_selection(capsys):
    code, out, _ = _run(capsys, "network", "--N", "2", "--delta", "0.01",
                        "--couplings", "0.03", "0.03")
    tab = read_csv(out)
    assert code == EXIT_OK and len(tab.rows) == 6
    designated = [r for r in tab.rows if r[2]]
    assert [(r[0], r[1]) for r in designated] == [(1, 2), (3, 4)]
    assert all(r[3] > 0 for r in designated)
    code, out, _ = _run(capsys, "network", "--N", "2", "--delta", "0.01",
                        "--couplings", "0.03", "0.03", "--pair", "1", "3")
    rows = read_csv(out).rows
    assert len(rows) == 1 and rows[0][:2] == (1, 3) and rows[0][3] < 1e-3


def test_repro_header_embeds_parameters(capsys):
    code, out, _ = _run(capsys, "repro", "fig2b", "--points", "3")
    tab = read_csv(out)
    assert code == EXIT_OK
    assert tab.columns == ("omega_minus", "E_N", "stable")
    assert tab.meta["preset"] == "fig2b"
    assert tab.meta["model"]["opo"] == {"chi": 0.5, "kappa_c": 0.9, "kappa_c_prime": 0.0}
    assert tab.rows[0][1] < 1e-3


def test_exit_codes(capsys, tmp_path):
    bad = _cfg(tmp_path, mechanics=[{"omega": 1.0, "gama": 1e-5}])
    code, _, err = _run(capsys, "steady", "--config", bad)
    assert code == EXIT_CONFIG and "mechanics[0].gama" in err
    code, _, err = _run(capsys, "steady", "--pair", "1", "5")
    assert code == EXIT_CONFIG
    hot = _cfg(tmp_path, mechanics=[{"omega": 1.01, "G": 0.5}, {"omega": 0.99, "G": 0.5}])
    code, _, err = _run(capsys, "steady", "--config", hot)
    assert code == EXIT_PHYSICS and "UnstableSystemError" in err
    with pytest.raises(SystemExit):
        run(["steady", "--regime", "quantum"])


def test_ideal_regime_warning_goes_to_stderr(capsys):
    code, out, err = _run(capsys, "steady", "--regime", "ideal")
    assert code == EXIT_OK
    assert "outside its regime" in err


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "optomech_epr", "spectrum", "--count", "2"],
                         capture_output=True, text=True, check=True).stdout
    assert read_csv(out).rows[0][1] == pytest.approx(0.0816326530612, rel=1e-10)
