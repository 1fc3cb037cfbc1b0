import json
import subprocess
import sys

import numpy as np
import pytest

from scarsim import cli


def _run(capsys, *argv):
    rc = cli.main(list(argv))
    out, err = capsys.readouterr()
    return rc, (json.loads(out) if rc == 0 else None), err


def test_basis_dimension(capsys):
    rc, s, _ = _run(capsys, "basis", "--alpha", "1", "--sites", "24")
    assert rc == 0 and s["dimension"] == 103682


def test_basis_emit_states(capsys, tmp_path):
    path = tmp_path / "states.csv"
    rc, s, _ = _run(capsys, "basis", "--alpha", "2", "--sites", "8", "--boundary", "obc",
                    "--emit-states", str(path))
    lines = path.read_text().splitlines()
    body = [l for l in lines if not l.startswith("#")]
    assert body[0] == "ordinal,bitmask,occupation"
    assert len(body) - 1 == s["dimension"]


def test_header_round_trip_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    rc, _, _ = _run(capsys, "quench", "--alpha", "1", "--sites", "10", "--cell", "2", "--state", "K",
                    "--points", "21", "--tmax", "3", "--out", str(a))
    assert rc == 0
    rc, _, _ = _run(capsys, "quench", "--from-header", str(a), "--out", str(b))
    assert rc == 0
    assert a.read_bytes() == b.read_bytes()
    head = [l for l in a.read_text().splitlines() if l.startswith("#")]
    assert head[0].startswith("# scarsim ") and head[1].startswith("# config: ")


def test_header_command_mismatch(capsys, tmp_path):
    a = tmp_path / "a.csv"
    _run(capsys, "state", "--alpha", "1", "--sites", "8", "--cell", "2", "--kind", "K", "--out", str(a))
    rc, _, err = _run(capsys, "quench", "--from-header", str(a))
    assert rc == cli.EXIT_CONFIG and json.loads(err)["error"] == "config"


def test_yaml_config_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("alpha: 2\nsites: 12\nboundary: obc\n")
    rc, s, _ = _run(capsys, "basis", "--config", str(cfg))
    assert (s["alpha"], s["sites"], s["boundary"]) == (2, 12, "obc")
    rc, s, _ = _run(capsys, "basis", "--config", str(cfg), "--sites", "13")
    assert s["sites"] == 13


@pytest.mark.parametrize("argv", [
    ["basis", "--alpha", "-1"],
    ["tdvp", "--theta0", "0,1"],
    ["quench", "--alpha", "1", "--sites", "8", "--state", "nonsense"],
    ["state", "--sites", "8", "--out", "a,b,c"],
])
def test_bad_configuration_exit_code(capsys, argv):
    rc, _, err = _run(capsys, *argv)
    assert rc == cli.EXIT_CONFIG
    assert json.loads(err)["error"] == "config"


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("colour: blue\n")
    rc, _, _ = _run(capsys, "basis", "--config", str(cfg))
    assert rc == cli.EXIT_CONFIG


def test_numeric_failure_exit_code(capsys, monkeypatch):
    def boom(cfg):
        raise np.linalg.LinAlgError("no convergence")
    monkeypatch.setitem(cli.HANDLERS, "basis", boom)
    rc, _, err = _run(capsys, "basis")
    assert rc == cli.EXIT_NUMERIC and json.loads(err)["error"] == "numeric"


def test_state_and_algebra(capsys, tmp_path):
    amps = tmp_path / "amps.csv"
    rc, s, _ = _run(capsys, "state", "--alpha", "1", "--sites", "8", "--cell", "2", "--kind", "K",
                    "--out", str(amps))
    assert rc == 0 and s["norm"] == pytest.approx(1.0)
    report = tmp_path / "alg.json"
    rc, s, _ = _run(capsys, "algebra", "--alpha", "1", "--sites", "8", "--cell", "2", "--report", str(report))
    assert rc == 0 and json.loads(report.read_text())["cell"] == 2
    assert set(s["residuals"]) == {"zx", "yz", "xy"}


def test_spectrum_towers(capsys, tmp_path):
    ov = tmp_path / "ov.csv"
    rc, s, _ = _run(capsys, "spectrum", "--alpha", "1", "--sites", "12", "--cell", "2", "--probe", "Z2",
                    "--out", f"{tmp_path / 's.json'},{ov}")
    assert rc == 0 and s["n_eigenstates"] == 322
    body = [l for l in ov.read_text().splitlines() if not l.startswith("#")]
    assert len(body) == 323


def test_tdvp_summary(capsys):
    rc, s, _ = _run(capsys, "tdvp", "--alpha", "1", "--points", "51")
    assert rc == 0
    assert s["closure"] < 1e-6
    assert max(abs(x) for x in s["floquet_exponents"]) < 1e-6


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "scarsim.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("scarsim ")
