import csv
import io
import json
import math
import re
from pathlib import Path

import pytest

from hydrotrade.cli import SWEEP_COLUMNS, main
from hydrotrade.config import dump_config, load_config, parse_config

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def bom(*argv):
    code, text, err = run("size", *argv, "--format", "json")
    assert code == 0, err
    return json.loads(text)


def test_size_baseline_report():
    code, text, _ = run("size", "baseline")
    assert code == 0
    last = text.strip().splitlines()[-1]
    m = re.fullmatch(r"total (\d+\.\d+) kg", last)
    assert m and float(m.group(1)) == pytest.approx(4.43, rel=0.005)
    assert "0.3*(31.75)^0.71" in text
    assert "N*m" in text and " W," in text


def test_size_motor_k_override():
    ref = bom("baseline")
    big = bom("baseline", "--set", "motor.k_mass=1.2")
    mass = lambda r: [i["mass_kg"] for i in r["items"] if i["kind"] == "motor"][0]
    assert mass(big) == pytest.approx(4 * mass(ref), rel=1e-12)


def test_size_two_speed_motors():
    r = bom("two-speed", "--lambda", "3")
    motors = [i for i in r["items"] if i["kind"] == "motor"]
    assert len(motors) == 2
    # task 1 (100 N*m, 9.4/3 rad/s, speed-bound) and task 2 (33.3 N*m, 9.4 rad/s)
    for i, (torque, speed) in enumerate([(100.0, 9.4 / 3), (100 / 3, 9.4)]):
        n = math.floor(309 * (torque * speed / (0.9 * 309)) ** (-0.64 / 0.36) / speed * 10 + 1e-9) / 10
        tau = torque / (0.9 * n)
        assert motors[i]["requirement"] == pytest.approx(tau, rel=1e-9)
        assert motors[i]["mass_kg"] == pytest.approx(0.38, abs=0.05)


def test_size_csv_format():
    code, text, _ = run("size", "baseline", "--format", "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][:3] == ["kind", "label", "count"]
    assert rows[-1][0] == "total"
    assert float(rows[-1][6]) == pytest.approx(sum(float(r[6]) for r in rows[1:-1]))


def test_size_infeasible_exit_code():
    code, text, _ = run("size", "baseline", "--set", "study.base_torque=120")
    assert code == 2
    assert "NO - " in text


def test_size_solver_failure_exit_code():
    code, _, err = run("size", "baseline", "--set", "motor.a_speed=-1.5")
    assert code == 2
    assert "infeasible" in err


def test_options_before_or_after_command():
    a = bom("two-speed", "--lambda", "2")
    out, err = io.StringIO(), io.StringIO()
    assert main(["--lambda", "2", "size", "two-speed", "--format", "json"], out, err) == 0
    assert json.loads(out.getvalue()) == a


def test_sweep_two_speed_files(tmp_path):
    code, text, _ = run("sweep", "two-speed", "--out", str(tmp_path))
    assert code == 0
    csv_path = tmp_path / "two-speed_lambda_total_mass.csv"
    svg = (tmp_path / "two-speed_lambda_total_mass.svg").read_text()
    assert svg.startswith("<svg") and "break-even" in svg
    rows = list(csv.DictReader(csv_path.open()))
    assert tuple(rows[0]) == SWEEP_COLUMNS
    assert len(rows) == 61
    diffs = [float(r["baseline"]) - float(r["multimodal"]) for r in rows]
    i = next(k for k in range(60) if diffs[k] * diffs[k + 1] < 0)
    lo, hi = float(rows[i]["parameter"]), float(rows[i + 1]["parameter"])
    assert lo <= 2.0 + 0.35 and hi >= 1.65
    m = re.search(r"break-even lambda = (\d+\.\d+)", text)
    assert lo <= float(m.group(1)) <= hi


def test_sweep_offset_gap(tmp_path):
    code, text, _ = run("sweep", "offset", "--out", str(tmp_path), "--format", "csv")
    assert code == 0
    rows = {round(float(r["parameter"]), 6): r for r in csv.DictReader(io.StringIO(text))}
    gap = float(rows[3.0]["baseline"]) - float(rows[3.0]["multimodal"])
    assert 2.1 * 0.7 <= gap <= 2.1 * 1.3


def test_sweep_empty_range_writes_nothing(tmp_path):
    out = tmp_path / "out"
    code, _, err = run("sweep", "two-speed", "--lo", "3", "--hi", "3", "--out", str(out))
    assert code == 1
    assert "empty sweep range" in err
    assert not out.exists()


def test_sweep_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run("sweep", "two-speed", "--points", "3", "--out", str(blocker / "sub"))
    assert code == 3
    assert "I/O error" in err


def test_sweep_csv_golden(tmp_path):
    code, text, _ = run("sweep", "two-speed", "--points", "7", "--out", str(tmp_path),
                        "--format", "csv")
    assert code == 0
    golden = (GOLDEN / "two_speed_lambda_total_mass.csv").read_text()
    assert text == golden
    assert golden.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    # the baseline column is constant: 0.3*(100/(0.9*3.5))^0.71 + 5500/15000 + 0.56
    base = 0.3 * (100 / 3.15) ** 0.71 + 5500 / 15000 + 0.56
    for row in csv.DictReader(io.StringIO(golden)):
        assert float(row["baseline"]) == pytest.approx(base, abs=1e-6)


def test_sweep_json_nan_rows(tmp_path):
    code, text, _ = run("sweep", "locking", "--points", "3", "--out", str(tmp_path),
                        "--format", "json")
    assert code == 0
    data = json.loads(text)
    assert data["parameter"] == "gamma" and data["metric"] == "mass_plus_battery"
    assert len(data["rows"]) == 3


def write_catalog(path, rows):
    path.write_text("x,y,label\n" + "".join(f"{x},{y},{l}\n" for x, y, l in rows))
    return str(path)


def test_fit_exact_law(tmp_path):
    cat = write_catalog(tmp_path / "c.csv", [(x, 0.95 * x**0.56, f"p{x}") for x in (0.1, 1, 10)])
    code, text, _ = run("fit", cat, "--format", "json")
    assert code == 0
    data = json.loads(text)
    assert data["r_squared"] == pytest.approx(1.0, abs=1e-12)
    assert data["k"] == pytest.approx(0.95, rel=1e-9)
    assert data["a"] == pytest.approx(0.56, rel=1e-9)


def test_fit_accumulator_dataset():
    from importlib.resources import files

    code, text, _ = run("fit", str(files("hydrotrade") / "data" / "accumulator_catalog.csv"))
    assert code == 0
    m = re.match(r"y = ([\d.]+) \* x\^([\d.]+)", text)
    assert float(m.group(1)) == pytest.approx(0.95, rel=0.15)
    assert float(m.group(2)) == pytest.approx(0.56, abs=0.01)
    assert "R^2" in text and "ln resid" in text


def test_fit_single_row(tmp_path):
    code, _, err = run("fit", write_catalog(tmp_path / "one.csv", [(1, 2, "a")]))
    assert code == 1
    assert "need >= 2 points" in err


def test_fit_malformed_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y,label\n1,2,a\nx1,2,b\n4,2,c\n")
    code, _, err = run("fit", str(path))
    assert code == 1
    assert "line 3" in err


def test_fit_missing_file(tmp_path):
    code, _, _ = run("fit", str(tmp_path / "none.csv"))
    assert code == 3


def test_dump_config_round_trip(tmp_path):
    code, text, _ = run("--dump-config", "--set", "motor.k_mass=0.25", "--lambda", "2.5",
                        "--set", "study.cycle_hours=0.5")
    assert code == 0
    path = tmp_path / "study.ini"
    path.write_text(text)
    cfg = load_config(str(path))
    assert cfg.params.lam == 2.5
    assert cfg.params.library.motor.mass_law.k == 0.25
    assert dump_config(cfg) == text
    code, again, _ = run("--config", str(path), "--dump-config")
    assert again == text


def test_default_config_round_trip():
    cfg = load_config()
    assert parse_config(dump_config(cfg)) == cfg


def test_unknown_key_reports_location(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[study]\nlambda = 2\n\n[motor]\nk_mas = 0.3\n")
    code, _, err = run("--config", str(path), "size", "baseline")
    assert code == 1
    assert f"{path}:5" in err and "k_mas" in err


def test_unknown_section(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[gearbox]\nratio = 3\n")
    code, _, err = run("--config", str(path), "size", "baseline")
    assert code == 1
    assert "gearbox" in err


def test_bad_override():
    code, _, err = run("size", "baseline", "--set", "motor.k_mass=heavy")
    assert code == 1
    code, _, err = run("size", "baseline", "--set", "nokey")
    assert code == 1


def test_usage_errors():
    assert run()[0] == 1
    assert run("size")[0] == 1
    assert run("size", "rotary")[0] == 1
    assert run("size", "baseline", "--lambda", "0.5")[0] == 1


def test_sensitivity_text():
    code, text, _ = run("sensitivity", "--multipliers", "1,4")
    assert code == 0
    lines = text.strip().splitlines()
    assert float(lines[1].split()[1]) == pytest.approx(1.69, abs=0.05)
    assert "> 10" in lines[2]


def test_report_all(tmp_path):
    code, text, _ = run("report-all", "--out", str(tmp_path))
    assert code == 0
    names = {p.name for p in tmp_path.iterdir()}
    for stem in ("fig6a_two_speed_mass_two-speed.csv", "fig6a_two_speed_mass.svg",
                 "fig8a_boost_mass.csv", "fig8b_offset_mass.csv", "fig9a_locking_mean_loss.csv",
                 "fig9b_locking_mass_battery_1h.csv", "fig9b_locking_mass_battery_10min.csv",
                 "sensitivity.csv", "summary.txt"):
        assert stem in names
    for p in tmp_path.glob("*.csv"):
        if p.name != "sensitivity.csv":
            assert p.read_text().splitlines()[0] == ",".join(SWEEP_COLUMNS)
    assert "sensitivity x4" in text
