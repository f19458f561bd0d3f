import csv
import json
import math
import subprocess
import sys

import pytest

from critstrip import __version__
from critstrip.cli import main
from critstrip.report import ReportRecord, config_hash, format_value, read_report, render_csv, write_report


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_zeta_eval_summary_and_report(tmp_path, capsys):
    path = tmp_path / "z.csv"
    code, out, _ = run_cli(capsys, "zeta-eval", "--s", "2,0", "-o", str(path))
    assert code == 0
    assert out.strip() == "zeta(2+0i) = 1.6449341"
    lines = path.read_bytes().split(b"\n")
    assert lines[-1] == b"" and len(lines) == 3   # header, one record, trailing LF
    assert b"\r" not in path.read_bytes()
    row = read_report(path, "csv")[0]
    assert row["version"] == __version__
    assert float(row["value_re"]) == pytest.approx(math.pi ** 2 / 6, abs=1e-10)


def test_zeta_eval_all_routes(tmp_path, capsys):
    path = tmp_path / "z.csv"
    code, _, _ = run_cli(capsys, "zeta-eval", "--s", "2,0", "--route", "all", "--N", "100000",
                         "--P", "100000", "-o", str(path))
    assert code == 0
    rows = read_report(path, "csv")
    assert [r["route"] for r in rows] == ["eta", "dirichlet", "euler"]
    for r in rows:
        assert abs(float(r["value_re"]) - math.pi ** 2 / 6) <= float(r["error_bound"]) + 1e-12


def test_pole_exit_code(tmp_path, capsys):
    path = tmp_path / "pole.csv"
    code, out, err = run_cli(capsys, "zeta-eval", "--s", "1,0", "-o", str(path))
    assert code == 2
    assert out == "" and "PoleAt1" in err
    row = read_report(path, "csv")[0]
    assert row["status"] == "error" and row["error_type"] == "PoleAt1"


def test_nonconvergence_exit_code(tmp_path, capsys):
    path = tmp_path / "g.csv"
    code, _, _ = run_cli(capsys, "pringsheim-check", "--kernel", "grandi", "--N", "64", "-o", str(path))
    assert code == 3
    assert read_report(path, "csv")[0]["pringsheim_ok"] == "false"


def test_config_errors_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("N = lots\n")
    assert run_cli(capsys, "eta-eval", "--s", "1,0", "--config", str(bad), "-o", str(tmp_path / "e.csv"))[0] == 1
    assert run_cli(capsys, "eta-eval", "--s", "1,0", "-o", str(tmp_path / "missing" / "e.csv"))[0] == 1
    assert run_cli(capsys, "eta-eval", "--s", "nope", "-o", str(tmp_path / "e.csv"))[0] == 1
    assert run_cli(capsys, "condition-scan", "--eps", "0.3", "-o", str(tmp_path / "c.csv"))[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["eta-eval"])
    assert exc.value.code == 1


def test_scan_row_count(tmp_path, capsys):
    path = tmp_path / "scan.csv"
    code, out, _ = run_cli(capsys, "condition-scan", "--N", "200", "--K", "200", "-o", str(path))
    assert code == 0
    assert "over 441 points" in out
    assert len(read_report(path, "csv")) == 441


def test_scan_bytes_independent_of_workers(tmp_path, capsys, monkeypatch):
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    common = ["condition-scan", "--nx", "4", "--ny", "4", "--N", "300", "--K", "300"]
    run_cli(capsys, *common, "--workers", "1", "-o", str(a))
    run_cli(capsys, *common, "--workers", "3", "-o", str(b))
    monkeypatch.setenv("CSL_WORKERS", "2")
    run_cli(capsys, *common, "-o", str(c))
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_json_round_trip(tmp_path, capsys):
    path = tmp_path / "e.json"
    code, _, _ = run_cli(capsys, "eta-eval", "--s", "0.75,14", "--format", "json", "-o", str(path))
    assert code == 0
    body = json.loads(path.read_text())
    assert body["meta"]["count"] == 1 and body["meta"]["command"] == "eta-eval"
    rec = body["records"][0]
    assert complex(rec["value_re"], rec["value_im"]) == pytest.approx(
        0.39294187131461525202 - 0.19240212205388738167j, abs=1e-10)


def test_report_values_round_trip(tmp_path):
    vals = [0.1, 1 / 3, math.pi, 1e-300, -2.5e17, 5e-324]
    recs = [ReportRecord("eta-eval", {"i": i}, {"v": v}, {}, "h") for i, v in enumerate(vals)]
    write_report(recs, "json", tmp_path / "r.json")
    write_report(recs, "csv", tmp_path / "r.csv")
    assert [r["v"] for r in read_report(tmp_path / "r.json", "json")] == vals
    assert [float(r["v"]) for r in read_report(tmp_path / "r.csv", "csv")] == vals


def test_format_value():
    assert format_value(True) == "true"
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(None) == ""
    with pytest.raises(ValueError):
        write_report([], "csv", "unused.csv")


def test_csv_column_order():
    rec = ReportRecord("x", {"a": 1}, {"b": 2.0}, {"c": 3.0}, "h", wall_time=0.5)
    header = render_csv([rec]).splitlines()[0]
    assert header == "command,a,b,c,wall_time,version,config_hash"


def test_config_precedence(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\nN = 300\nK=300\nworkers = 2\nformat = json\n")
    path = tmp_path / "p.json"
    run_cli(capsys, "fe-verify", "--s", "2,0", "--config", str(cfg), "-o", str(path))
    rec = read_report(path, "json")[0]
    assert rec["N"] == 300 and rec["K"] == 300
    run_cli(capsys, "fe-verify", "--s", "2,0", "--config", str(cfg), "--N", "400", "-o", str(path))
    assert read_report(path, "json")[0]["N"] == 400
    # workers never enter the hash, whichever source sets them
    h1 = read_report(path, "json")[0]["config_hash"]
    monkeypatch.setenv("CSL_WORKERS", "5")
    run_cli(capsys, "fe-verify", "--s", "2,0", "--config", str(cfg), "--N", "400", "--workers", "1", "-o", str(path))
    assert read_report(path, "json")[0]["config_hash"] == h1


def test_env_workers_must_be_integer(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CSL_WORKERS", "many")
    assert run_cli(capsys, "eta-eval", "--s", "1,0", "-o", str(tmp_path / "e.csv"))[0] == 1


def test_config_hash_is_stable():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
    assert len(config_hash({})) == 16


def test_timing_column_only_when_asked(tmp_path, capsys):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli(capsys, "eta-eval", "--s", "1,0", "-o", str(p1))
    run_cli(capsys, "eta-eval", "--s", "1,0", "--timing", "-o", str(p2))
    assert "wall_time" not in read_report(p1, "csv")[0]
    assert float(read_report(p2, "csv")[0]["wall_time"]) >= 0


@pytest.mark.parametrize("argv,needle", [
    (["fe-verify", "--s", "2,0", "--s2", "3,0", "--N", "2000"], "region A residual"),
    (["fe-verify", "--s", "0.75,10", "--N", "2000", "--K", "2000"], "strip residual"),
    (["appendix-c", "--N", "2000", "--K", "2000"], "folded sum at s=1"),
    (["summability-check"], "summability checks:"),
    (["zeros-locate", "--T", "26"], "3 zeros up to T=26"),
    (["pringsheim-check", "--kernel", "inverse-square", "--N", "400", "--tol", "0.1"], "pringsheim_ok=True"),
])
def test_subcommands_run(tmp_path, capsys, argv, needle):
    code, out, _ = run_cli(capsys, *argv, "-o", str(tmp_path / "r.csv"))
    assert code == 0
    assert needle in out


def test_plot_writes_png(tmp_path, capsys):
    pytest.importorskip("matplotlib")
    path = tmp_path / "scan.csv"
    code, _, _ = run_cli(capsys, "condition-scan", "--nx", "3", "--ny", "3", "--N", "200", "--K", "200",
                         "--plot", "-o", str(path))
    assert code == 0
    png = tmp_path / "scan.png"
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    code, _, _ = run_cli(capsys, "zeros-locate", "--T", "16", "--plot", "-o", str(tmp_path / "z.csv"))
    assert code == 0 and (tmp_path / "z.png").exists()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "critstrip", "eta-eval", "--s", "1,0",
                           "-o", str(tmp_path / "e.csv")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "eta(1+0i) = 0.69314718"
