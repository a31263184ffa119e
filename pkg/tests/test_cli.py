import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from frax.cli import UsageError, main, parse_config
from frax.report import load_schema


def run_cli(argv, tmp_path, name="out"):
    out = tmp_path / name
    rc = main(list(argv) + ["-o", str(out)])
    return rc, (out.read_text() if out.exists() else None)


def test_verify_dedu_passes_and_matches_schema(tmp_path):
    rc, text = run_cli(["verify", "--s", "0.25", "--identity", "dedu"], tmp_path)
    assert rc == 0
    data = json.loads(text)
    jsonschema.validate(data, load_schema())
    assert len(data) == 5
    assert all(r["pass"] for r in data)
    assert all(r["identity_id"] == "dedu" for r in data)


def test_verify_outputs_byte_identical(tmp_path):
    argv = ["verify", "--s", "0.25", "0.75", "--identity", "dedu", "partial-Green"]
    rc1, a = run_cli(argv, tmp_path, "a.json")
    rc2, b = run_cli(argv, tmp_path, "b.json")
    assert rc1 == rc2 == 0
    assert a == b


def test_verify_csv_format(tmp_path):
    rc, text = run_cli(["verify", "--s", "0.25", "--identity", "dedu", "--format", "csv"], tmp_path)
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 5


def test_tolerance_override_failure_still_writes(tmp_path, capsys):
    rc, text = run_cli(["verify", "--s", "0.25", "--identity", "dedu", "--tol", "dedu=0"], tmp_path)
    assert rc == 1
    data = json.loads(text)
    assert sum(not r["pass"] for r in data) >= 1
    err = capsys.readouterr().err
    assert "gated failures" in err and "FAIL FAIL" not in err


@pytest.mark.parametrize("argv", [
    ["verify", "--s"],
    ["verify", "--s", ""],
    ["verify", "--s", "1.5"],
    ["verify", "--s", "abc"],
    ["verify", "--identity", "nope"],
    ["verify", "--tol", "dedu"],
    ["verify", "--tol", "nope=1e-3"],
    ["verify", "--x", "1.2"],
    ["vortex", "--s", "0.3", "0.5"],
    ["vortex", "--dt", "0"],
])
def test_usage_errors_exit_2(argv, tmp_path):
    assert main(argv + ["-o", str(tmp_path / "x")]) == 2


def test_bad_output_path_exits_2(tmp_path):
    assert main(["robin", "--s", "0.3", "--x", "0", "-o", str(tmp_path / "missing" / "out.json")]) == 2


def test_unknown_config_key_exits_2(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"s": [0.25], "bogus": 1}))
    assert main(["verify", "--config", str(conf), "-o", str(tmp_path / "o")]) == 2
    assert main(["verify", "--config", str(tmp_path / "absent.yaml")]) == 2


def test_config_supplies_defaults_and_flags_win(tmp_path):
    conf = tmp_path / "c.yaml"
    conf.write_text("s: [0.25, 0.75]\nidentity: [dedu]\nx: [0.1, 0.2]\n")
    cfg = parse_config(["verify", "--config", str(conf)])
    assert cfg.s_values == [0.25, 0.75]
    assert cfg.grid["x"] == [0.1, 0.2]
    cfg = parse_config(["verify", "--config", str(conf), "--s", "0.4"])
    assert cfg.s_values == [0.4]
    assert cfg.options["identities"] == ["dedu"]
    jconf = tmp_path / "c.json"
    jconf.write_text(json.dumps({"s": [0.3], "half-width": 2.0}))
    assert parse_config(["robin", "--config", str(jconf)]).grid["half_width"] == 2.0


def test_parse_rejects_empty_grid():
    with pytest.raises(UsageError):
        parse_config(["green", "--x", ","])


def test_green_table(tmp_path):
    rc, text = run_cli(["green", "--s", "0.3", "--x", "0.1", "0.5", "--y", "-0.5", "0.2", "--format", "csv"],
                       tmp_path)
    assert rc == 0
    lines = text.splitlines()
    assert lines[0] == "s,x,y,G,dGdx,dGdy"
    assert len(lines) == 5
    assert all(float(r.split(",")[3]) > 0 for r in lines[1:])


def test_robin_table(tmp_path):
    rc, text = run_cli(["robin", "--s", "0.5", "0.25", "--x", "0", "0.3"], tmp_path)
    assert rc == 0
    rows = json.loads(text)
    assert [set(r) for r in rows] == [{"s", "x", "R", "dR"}] * 4
    assert rows[0]["dR"] == 0.0


def test_hadamard_group_keeps_exploratory_ungated(tmp_path):
    rc, text = run_cli(["hadamard", "--s", "0.25", "0.75", "--x", "0.2", "--y", "-0.4"], tmp_path)
    assert rc == 0
    data = json.loads(text)
    exploratory = [r for r in data if not r["gated"]]
    assert exploratory and all(r["params"]["s"] == 0.75 for r in exploratory)
    assert all(r["pass"] for r in data if r["gated"])


def test_rkhs_group(tmp_path):
    rc, text = run_cli(["rkhs", "--s", "0.25", "--x", "0.0", "0.5"], tmp_path)
    assert rc == 0
    jsonschema.validate(json.loads(text), load_schema())


def test_vortex_pair_conserves_energy(tmp_path):
    rc, text = run_cli(["vortex", "--pair-equal", "--gamma", "1", "--d", "1", "--T", "10"], tmp_path)
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == ["t", "x1", "y1", "x2", "y2", "H", "Mx", "My", "I"]
    h = [float(r["H"]) for r in rows]
    assert max(abs(v - h[0]) for v in h) / abs(h[0]) <= 1e-6
    assert float(rows[-1]["t"]) == pytest.approx(10.0)


def test_vortex_max_drift_gate(tmp_path):
    argv = ["vortex", "--three", "--T", "1", "--dt", "0.2", "--every", "5"]
    assert run_cli(argv + ["--max-drift", "1e-30"], tmp_path)[0] == 1
    assert run_cli(argv + ["--max-drift", "1.0"], tmp_path)[0] == 0


def test_vortex_disk_and_custom_start(tmp_path):
    rc, text = run_cli(["vortex", "--disk", "--T", "1", "--dt", "1e-2", "--every", "50"], tmp_path)
    assert rc == 0 and text.splitlines()[0].startswith("t,x1,y1")
    rc, _ = run_cli(["vortex", "--positions", "0,0;1,0;0,1", "--strengths", "1,-2,1", "--T", "0.1",
                     "--dt", "1e-2"], tmp_path)
    assert rc == 0
    assert run_cli(["vortex", "--positions", "0,0,1", "--T", "0.1"], tmp_path)[0] == 2
    assert run_cli(["vortex", "--disk", "--r0", "1.5"], tmp_path)[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "frax", "robin", "--s", "0.25", "--x", "0.3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)[0]["x"] == 0.3
    bad = subprocess.run([sys.executable, "-m", "frax", "verify", "--s", "2"], capture_output=True, text=True,
                         check=False)
    assert bad.returncode == 2 and "error" in bad.stderr
