import json
import os
import subprocess
import sys

import pytest

from watermelon import cli
from watermelon.tableio import parse_csv, to_csv


def run_cli(args, tmp_path, config_text=None):
    env = dict(os.environ, WATERMELON_CACHE=str(tmp_path / "cache"))
    cwd = tmp_path
    if config_text is not None:
        (tmp_path / "watermelon.conf").write_text(config_text)
    proc = subprocess.run([sys.executable, "-m", "watermelon.cli", *args],
                          capture_output=True, text=True, cwd=cwd, env=env)
    return proc


def test_tw_dispatch(tmp_path):
    proc = run_cli(["tw", "--which", "f1", "--xmin", "-2", "--xmax", "2",
                    "--step", "0.5"], tmp_path)
    assert proc.returncode == 0
    table = parse_csv(proc.stdout)
    assert table.columns == ("x", "F1")
    assert len(table.rows) == 9
    vals = [row[1] for row in table.rows]
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert vals == sorted(vals)


def test_height_k_grid_dispatch(tmp_path):
    proc = run_cli(["height", "--N", "8", "--wall", "absorbing",
                    "--k-grid", "-2:2:1"], tmp_path)
    assert proc.returncode == 0
    table = parse_csv(proc.stdout)
    assert table.columns == ("k", "cdf", "F1", "diff")
    assert table.params["N"] == "8" and table.params["wall"] == "absorbing"


def test_usage_errors_exit_1(tmp_path):
    cases = [
        ["height", "--N", "2", "--wall", "absorbing"],                      # missing grid
        ["height", "--N", "2", "--wall", "absorbing",
         "--M-grid", "1:2:0.5", "--k-grid", "0:1:1"],                       # conflict
        ["tw", "--which", "f2", "--xmax", "oops"],                          # malformed
        ["tw", "--which", "f2", "--bogus"],                                 # unknown flag
        ["nosuchcommand"],
    ]
    for args in cases:
        assert run_cli(args, tmp_path).returncode == 1


def test_io_error_exit_3(tmp_path):
    proc = run_cli(["--output", str(tmp_path / "no" / "dir" / "x.csv"),
                    "tw", "--which", "f2", "--xmin", "0", "--xmax", "1",
                    "--step", "0.5"], tmp_path)
    assert proc.returncode == 3


def test_config_file_and_flag_precedence(tmp_path):
    out_from_conf = tmp_path / "from_conf.csv"
    proc = run_cli(["dgop", "--n", "4", "--a", "0.8", "--kmax", "2"],
                   tmp_path, config_text=f"output = {out_from_conf}\n")
    assert proc.returncode == 0 and out_from_conf.exists()
    out_flag = tmp_path / "flag.json"
    proc = run_cli(["--output", str(out_flag), "--format", "json",
                    "dgop", "--n", "4", "--a", "0.8", "--kmax", "2"],
                   tmp_path, config_text=f"output = {out_from_conf}\nformat = csv\n")
    assert proc.returncode == 0
    payload = json.loads(out_flag.read_text())
    assert payload["columns"] == ["k", "A", "B", "log_h"]
    assert len(payload["rows"]) == 3


def test_unknown_config_key_rejected(tmp_path):
    proc = run_cli(["tw", "--which", "f2"], tmp_path,
                   config_text="no_such_key = 7\n")
    assert proc.returncode == 1


def test_bad_tail_tol_rejected(tmp_path):
    proc = run_cli(["--tail-tol", "1e-5", "tw", "--which", "f2"], tmp_path)
    assert proc.returncode == 1


def test_dgop_json_csv_row_parity(tmp_path):
    pcsv = run_cli(["dgop", "--n", "5", "--a", "1.1", "--kmax", "3"], tmp_path)
    pjson = run_cli(["--format", "json", "dgop", "--n", "5", "--a", "1.1",
                     "--kmax", "3"], tmp_path)
    rows_csv = parse_csv(pcsv.stdout).rows
    rows_json = json.loads(pjson.stdout)["rows"]
    assert len(rows_csv) == len(rows_json)
    for rc, rj in zip(rows_csv, rows_json):
        assert list(rc) == rj


def test_csv_round_trip_through_emitter(tmp_path):
    proc = run_cli(["height", "--N", "3", "--wall", "reflecting",
                    "--M-grid", "1:3:0.5"], tmp_path)
    text = proc.stdout
    assert to_csv(parse_csv(text)) == text


def test_determinism_modulo_wall_clock(tmp_path):
    args = ["tw", "--which", "f2", "--xmin", "-1", "--xmax", "1", "--step", "0.5"]
    a = run_cli(args, tmp_path).stdout.splitlines()
    b = run_cli(args, tmp_path).stdout.splitlines()
    strip = lambda lines: [l for l in lines if not l.startswith("# generated")]
    assert strip(a) == strip(b)


def test_validate_smoke_suite(tmp_path):
    proc = run_cli(["validate", "--suite", "psi"], tmp_path)
    assert proc.returncode == 0
    assert "criterion 15 PASS" in proc.stdout


def test_validate_failing_suite_exits_2(tmp_path):
    # the watermelon suite contains the two documented unattainable checks
    proc = run_cli(["validate", "--suite", "watermelon"], tmp_path)
    assert proc.returncode == 2
    assert "criterion 12 FAIL" in proc.stdout
    assert "criterion 14 FAIL" in proc.stdout
    assert "criterion 04 PASS" in proc.stdout


def test_painleve_cache_reused_across_commands(tmp_path):
    run_cli(["tw", "--which", "f2", "--xmin", "0", "--xmax", "1",
             "--step", "0.5"], tmp_path)
    cache = tmp_path / "cache"
    files = {p.name: p.stat().st_mtime_ns for p in cache.iterdir()}
    run_cli(["tw", "--which", "f1", "--xmin", "0", "--xmax", "1",
             "--step", "0.5"], tmp_path)
    after = {p.name: p.stat().st_mtime_ns for p in cache.iterdir()}
    assert files == after


def test_parse_args_in_process():
    config, ns = cli.parse_args(["tw", "--which", "f2"])
    assert config.command == "tw" and config.format == "csv"
    assert config.tail_tol == 1e-30
    with pytest.raises(cli.UsageError):
        cli.parse_args([])
