import json
import subprocess
import sys

import numpy as np
import pytest

from paulimag.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0, out
    return json.loads(out)


def test_bound_for_iron(capsys):
    out = run_json(capsys, "bound", "--bcc-a", "35/24")
    assert out["max_moment"] == "53/24"
    assert out["argmax"] == ["11/16", "11/48", "1/12", "0"]


def test_bound_for_spherical_spectrum(capsys):
    out = run_json(capsys, "bound", "--spherical")
    assert out["max_moment"] == "9/5"
    assert out["argmax"] == ["3/5", "1/5", "1/5", "0"]


def test_floor_for_spherical_spectrum(capsys):
    assert run_json(capsys, "floor", "--spherical")["min_moment"] == "0"


@pytest.mark.parametrize("convention, expected", [("chart", "1085/31104"), ("box", "1085/29184")])
def test_volume_fraction(capsys, convention, expected):
    out = run_json(capsys, "volume", "--convention", convention)
    assert out["fraction"] == expected


def test_zero_moment_rows_contain_pair_bound(capsys):
    rows = run_json(capsys, "project", "--zero-moment")["zero_moment_rows"]
    assert "4nu1 + 4nu2 <= 13" in rows


def test_nickel_minimum(capsys):
    out = run_json(capsys, "nickel")
    assert out["minimum"] == "173/120"
    assert out["attaining_rows"] == [2]


def test_check_reports_feasible_point(capsys):
    out = run_json(capsys, "check", "--nu", "7/5,7/5,7/5,7/5,7/5", "--mu", "3/5,1/5,1/5,0")
    assert out == {"feasible": True, "violated": []}


def test_dumped_table_round_trips(capsys, tmp_path):
    code, text, _ = run(capsys, "catalog", "--dump")
    assert code == 0
    path = tmp_path / "d7.txt"
    path.write_text(text)
    from_file = run_json(capsys, "bound", "--system-file", str(path), "--bcc-a", "35/24")
    builtin = run_json(capsys, "bound", "--bcc-a", "35/24")
    assert from_file == builtin


def test_curve_summary(capsys):
    out = run_json(capsys, "curve", "--points", "4")
    assert abs(out["summary"]["beta1"] - 0.55429) <= 1e-5
    assert abs(out["summary"]["M2_over_Msat"] - 0.99296) <= 1e-4


def test_curve_csv_is_repeatable(capsys):
    first = run(capsys, "curve", "--points", "5", "--format", "csv")
    second = run(capsys, "curve", "--points", "5", "--format", "csv")
    assert first == second
    lines = first[1].splitlines()
    assert lines[0].startswith("# summary: ")
    assert lines[1] == "t_reduced,m_reduced,beta,regime,curve"


def test_evolve_csv(capsys):
    code, out, _ = run(capsys, "evolve", "--points", "5", "--format", "csv")
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "beta,mu1,mu2,mu3,mu4,regime,active"
    assert [float(v) for v in rows[1].split(",")[1:5]] == [0.25] * 4


def test_evolve_transitions(capsys):
    out = run_json(capsys, "evolve", "--points", "21", "--beta-max", "2")
    rows = [t["printed_row"] for t in out["transitions"] if t["kind"] == "activate"]
    assert rows == [2, 0]


def test_crossover_and_baseline_from_files(capsys, tmp_path):
    temps = np.linspace(0.0, 1040.0, 300)
    path = tmp_path / "m.csv"
    path.write_text("T_kelvin,value\n" + "".join(f"{t!r},{1 - t / 1043!r}\n" for t in map(float, temps)))
    out = run_json(capsys, "crossover", "--data", str(path), "--m1", "0.95585", "--m2", "0.99296")
    assert out["T1_kelvin"] == pytest.approx(1043 * (1 - 0.95585), rel=1e-6)
    assert out["T2_kelvin"] == pytest.approx(1043 * (1 - 0.99296), rel=1e-6)
    quad = tmp_path / "chi.csv"
    quad.write_text("T_kelvin,value\n" + "".join(f"{t!r},{2e-6 * t * t + 0.5!r}\n" for t in map(float, temps)))
    out = run_json(capsys, "baseline", "--data", str(quad), "--window", "0", "500")
    assert out["a2"] == pytest.approx(2e-6, rel=1e-9)
    assert out["a0"] == pytest.approx(0.5, rel=1e-9)


@pytest.mark.parametrize("argv, reason", [
    (["bound", "--bcc-a", "2"], "high_spin_infeasible"),
    (["bound", "--nu", "1,1,1,1"], "dimension_mismatch"),
    (["bound", "--nu", "2,2,2,1/2,1/2"], "high_spin_infeasible"),
    (["curve", "--t-min", "0", "--points", "3"], "out_of_range"),
])
def test_domain_errors_exit_one(capsys, argv, reason):
    code, out, _ = run(capsys, *argv)
    assert code == 1
    assert json.loads(out)["error"] == reason


def test_missing_data_file_is_invalid_input(capsys, tmp_path):
    code, out, _ = run(capsys, "baseline", "--data", str(tmp_path / "absent.csv"))
    assert code == 1
    assert json.loads(out)["error"] == "invalid_input"


@pytest.mark.parametrize("argv", [["bound"], ["bogus"], ["bound", "--bcc-a", "x/y"]])
def test_usage_errors_exit_two(capsys, argv):
    assert main(argv) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "paulimag", "volume"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["fraction"] == "1085/31104"
