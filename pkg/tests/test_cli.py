import io
import json
import math
import subprocess
import sys

import pytest

from loggas.cli import main


def run(args, tmp_path=None):
    out = io.StringIO()
    if tmp_path is not None and "--out" not in args:
        args = args + ["--out", str(tmp_path)]
    code = main(args, out=out)
    text = out.getvalue()
    return code, (json.loads(text) if text.strip() else None)


def test_w2_examples(tmp_path):
    code, res = run(["w2", "dirac:0", "uniform:0,1"])
    assert code == 0
    assert res["w2"] == pytest.approx(1 / math.sqrt(3), abs=1e-10)
    assert run(["w2", "semicircle", "semicircle"])[1]["w2"] == 0.0
    p = tmp_path / "a.csv"
    p.write_text("0\n1\n5\n")
    assert run(["w2", f"empirical:{p}", f"empirical:{p}"])[1]["w2"] == 0.0
    code, res = run(["w2", "--measure", "arc:0,1", "--measure", "arc:0.3,1.3", "--optimal"])
    assert code == 0 and res["w2"] == pytest.approx(0.3, abs=1e-7)


def test_w2_usage_errors():
    assert run(["w2", "semicircle"])[0] == 2
    assert run(["w2", "semicircle", "haar"])[0] == 2
    assert run(["w2", "semicircle", "nonsense"])[0] == 2


def test_energy_command():
    code, res = run(["energy", "uniform:-1,1"])
    assert code == 0
    assert res["total"] == pytest.approx(1 / 6 + 1.5 - math.log(2), abs=1e-9)
    assert run(["energy", "haar", "--potential", "zero"])[1]["total"] == pytest.approx(0.0, abs=1e-10)
    assert run(["energy", "dirac:1"])[1]["total"] == "inf"


def test_fekete_command(tmp_path):
    code, res = run(["fekete", "--n", "3"], tmp_path)
    assert code == 0
    assert res["energy"] == pytest.approx(0.0662184, abs=1e-7)
    rows = (tmp_path / "fekete_points.csv").read_text().splitlines()
    assert rows[0] == "i,x" and len(rows) == 4
    code, res = run(["fekete", "--n", "2"], tmp_path)
    pts = [float(r.split(",")[1]) for r in (tmp_path / "fekete_points.csv").read_text().splitlines()[1:]]
    assert pts == pytest.approx([-1.0, 1.0], abs=1e-12)
    assert json.loads((tmp_path / "fekete.json").read_text())["n"] == 2
    assert run(["fekete", "--n", "1"], tmp_path)[0] == 2
    assert run(["fekete", "--n", "4", "--potential", "zero"], tmp_path)[0] == 2


def test_fekete_other_quadratic(tmp_path):
    code, res = run(["fekete", "--n", "2", "--potential", "quadratic:1"], tmp_path)
    assert res["energy"] == pytest.approx(0.5 - 0.5 * math.log(2), abs=1e-12)
    assert res["delta_n_closed_form"] == pytest.approx(res["energy"], abs=1e-12)


def test_verify_property_runs(tmp_path):
    code, res = run(["verify", "semicircle", "--reps", "100"], tmp_path)
    assert code == 0 and res["violations"] == 0 and res["trials"] == 100
    code, res = run(["verify", "discrete", "--n", "20", "--reps", "1000"], tmp_path)
    assert code == 0 and res["violations"] == 0
    lines = (tmp_path / "verify_discrete.csv").read_text().splitlines()
    assert len(lines) == 1001
    assert len((tmp_path / "verify_discrete.jsonl").read_text().splitlines()) == 1000


def test_verify_equality_case(tmp_path):
    code, res = run(["verify", "line", "--measure", "semicircle:1,2"], tmp_path)
    assert code == 0
    assert abs(res["min_slack"]) <= 1e-8


def test_verify_reports_violation_exit_code(tmp_path):
    # A negative floor turns the exact equality case into a reported violation.
    code, res = run(["verify", "line", "--measure", "semicircle:1,2", "--tol=-1e-3"], tmp_path)
    assert code == 1 and res["violations"] == 1


def test_verify_circle_and_haar(tmp_path):
    assert run(["verify", "circle", "--reps", "5"], tmp_path)[0] == 0
    assert run(["verify", "circle", "--reps", "5", "--potential", "zero"], tmp_path)[0] == 0
    assert run(["verify", "circle", "--measure", "semicircle"], tmp_path)[0] == 2


def test_experiments(tmp_path):
    code, res = run(["experiment", "lln", "--n", "30", "--reps", "10"], tmp_path)
    assert code == 0 and res["reps"] == 10
    assert (tmp_path / "lln_summary.json").exists()
    code, res = run(["experiment", "clt", "--n", "30", "--reps", "10"], tmp_path)
    assert code == 0
    counts = [int(r.split(",")[2]) for r in (tmp_path / "clt_histogram.csv").read_text().splitlines()[1:]]
    assert sum(counts) == 10
    code, res = run(["experiment", "ldp", "--beta", "2"], tmp_path)
    assert code == 0 and res["R_star_at_lln"] <= 1e-8
    assert res["R_min_second_difference"] > 0
    assert run(["experiment", "lln", "--n", "1"], tmp_path)[0] == 2


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 25, "reps": 4, "seed": 5}))
    code, res = run(["experiment", "lln", "--config", str(cfg), "--reps", "6"], tmp_path)
    assert code == 0 and (res["n"], res["reps"], res["seed"]) == (25, 6, 5)
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["experiment", "lln", "--config", str(cfg)], tmp_path)[0] == 2


def test_repeated_runs_are_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        run(["experiment", "clt", "--n", "30", "--reps", "8", "--seed", "2", "--workers", str(k + 1)], d)
        outs.append({p.name: p.read_bytes() for p in d.iterdir()})
    assert outs[0] == outs[1]


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nothing"])
    assert exc.value.code == 2
    assert main([]) == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "loggas", "w2", "dirac:0", "dirac:2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["w2"] == 2.0
