"""Command-line interface: envelopes, exit codes, artifacts, determinism."""

import json
import math

import pytest

from driftplan.cli import main


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _envelope(out):
    doc = json.loads(out)
    assert set(doc) == {"schema_version", "command", "inputs", "results"}
    return doc


def test_plan_four_pi_golden(capsys):
    code, out, _ = _run(capsys, [
        "plan", "--start", "0,0,0", "--goal=-2.3,2.8,1.5707963267948966",
        "--current", "0.5,3.141592653589793", "--mode", "4pi",
    ])
    assert code == 0
    doc = _envelope(out)
    sol = doc["results"]["solution"]
    assert sol["path_type"] == "LSL"
    assert sol["travel_time"] == pytest.approx(10.51, rel=0.01)


def test_plan_two_pi_unreachable(capsys):
    code, out, _ = _run(capsys, [
        "plan", "--start", "0,0,0", "--goal", "6,3,5.497787143782138",
        "--current", "0.5,1.0471975511965976", "--mode", "2pi",
    ])
    assert code == 0
    doc = _envelope(out)
    assert doc["results"]["solution"] == "unreachable"


def test_plan_malformed_start_exits_2(capsys):
    code, _, err = _run(capsys, [
        "plan", "--start", "0,0", "--goal", "1,1,0", "--current", "0.1,0",
    ])
    assert code == 2
    assert "start" in err


def test_plan_fast_current_exits_2(capsys):
    code, _, err = _run(capsys, [
        "plan", "--start", "0,0,0", "--goal", "1,1,0", "--current", "1.5,0",
    ])
    assert code == 2
    assert "current speed" in err


def test_plan_current_degrees(capsys):
    code_rad, out_rad, _ = _run(capsys, [
        "plan", "--start", "0,0,0", "--goal", "4,2,1", "--current",
        f"0.4,{math.pi / 2}",
    ])
    code_deg, out_deg, _ = _run(capsys, [
        "plan", "--start", "0,0,0", "--goal", "4,2,1", "--current", "0.4,90",
        "--current-deg",
    ])
    assert code_rad == code_deg == 0
    assert json.loads(out_rad)["results"] == json.loads(out_deg)["results"]


def test_plan_round_trip_inputs(capsys):
    argv = ["plan", "--start", "1,2,0.3", "--goal", "4,5,0.6",
            "--current", "0.2,1.0", "--speed", "2.0", "--radius", "1.5"]
    code, out1, _ = _run(capsys, argv)
    assert code == 0
    echoed = json.loads(out1)["inputs"]
    argv2 = ["plan",
             "--start", ",".join(str(v) for v in echoed["start"]),
             "--goal", ",".join(str(v) for v in echoed["goal"]),
             "--current", ",".join(str(v) for v in echoed["current"]),
             "--speed", str(echoed["speed"]), "--radius", str(echoed["radius"])]
    code, out2, _ = _run(capsys, argv2)
    assert code == 0
    assert json.loads(out1)["results"] == json.loads(out2)["results"]


def test_plan_writes_trajectories(capsys, tmp_path):
    traj = tmp_path / "path.csv"
    code, out, _ = _run(capsys, [
        "plan", "--start", "0,0,0", "--goal", "4,2,1", "--current", "0.3,1.0",
        "--traj", str(traj),
    ])
    assert code == 0
    assert traj.exists()
    assert (tmp_path / "path_cf.csv").exists()
    header = traj.read_text().splitlines()[0]
    assert header == "t,x,y,theta,frame"


def test_reachmap_grid(capsys, tmp_path):
    out_csv = tmp_path / "grid.csv"
    code, out, _ = _run(capsys, [
        "reachmap", "--theta-f-deg", "315", "--current", "0.5,1.0471975511965976",
        "--bounds=-10,10,-10,10", "--step", "2.0", "--mode", "2pi",
        "--out", str(out_csv),
    ])
    assert code == 0
    doc = _envelope(out)
    assert doc["results"]["unreachable_cells"] > 0
    assert out_csv.exists()


def test_costmap_requires_out(capsys):
    code, _, _ = _run(capsys, [
        "costmap", "--theta-f", "1.0", "--current", "0.3,0",
    ])
    assert code == 2


def test_paramscan(capsys, tmp_path):
    out_csv = tmp_path / "scan.csv"
    code, out, _ = _run(capsys, [
        "paramscan", "--theta-f-step", "0.6283185307179586",
        "--theta-w-step", "0.6283185307179586", "--vw", "0.25,0.75",
        "--out", str(out_csv),
    ])
    assert code == 0
    doc = _envelope(out)
    assert doc["results"]["triples"] == 10 * 10 * 2
    assert 0 < doc["results"]["reachable_triples"] < doc["results"]["triples"]
    lines = out_csv.read_text().strip().splitlines()
    assert lines[0] == "theta_f,theta_w,v_w,reachable"


def test_paramscan_rejects_bad_speed(capsys):
    code, _, _ = _run(capsys, [
        "paramscan", "--vw", "1.5", "--out", "x.csv",
    ])
    assert code == 2


def test_simulate_scenario_file(capsys, tmp_path):
    doc = {
        "start": {"x": 0, "y": 0, "theta": 0},
        "goal": {"x": 5, "y": 8.5, "theta_deg": 135.0},
        "vehicle": {"speed": 1.0, "turning_radius": 1.0},
        "current_schedule": [
            {"t_start": 0, "speed": 0.5, "heading_deg": 180.0},
            {"t_start": 3.2, "speed": 0.75, "heading_deg": 270.0},
        ],
        "precision_radius": 1.0,
        "estimation_window": 0.0,
        "planner": "analytic_4pi",
    }
    scen = tmp_path / "scenario.json"
    scen.write_text(json.dumps(doc))
    traj = tmp_path / "flight.csv"
    code, out, _ = _run(capsys, [
        "simulate", "--scenario", str(scen), "--seed", "3", "--traj", str(traj),
    ])
    assert code == 0
    env = _envelope(out)
    assert env["results"]["converged"] is True
    assert env["results"]["total_time"] == pytest.approx(33.57, rel=0.05)
    assert traj.exists()


def test_simulate_missing_file_exits_2(capsys, tmp_path):
    code, _, _ = _run(capsys, [
        "simulate", "--scenario", str(tmp_path / "nope.json"),
    ])
    assert code == 2


def test_montecarlo_deterministic(capsys):
    argv = ["montecarlo", "--profile", "naval", "--runs", "2", "--seed", "7"]
    code1, out1, _ = _run(capsys, argv)
    code2, out2, _ = _run(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_montecarlo_unknown_profile(capsys):
    code, _, _ = _run(capsys, ["montecarlo", "--profile", "space", "--runs", "1"])
    assert code == 2


def test_bench_envelope(capsys):
    code, out, _ = _run(capsys, ["bench", "--instances", "3", "--seed", "1"])
    assert code == 0
    doc = _envelope(out)
    assert doc["results"]["mean_fourpi_seconds"] > 0
    assert doc["results"]["ratio"] > 1.0


def test_out_dir_environment_variable(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("DRIFTPLAN_OUT_DIR", str(tmp_path))
    code, out, _ = _run(capsys, [
        "paramscan", "--theta-f-step", "1.0", "--theta-w-step", "1.0",
        "--vw", "0.5", "--out", "rel_scan.csv",
    ])
    assert code == 0
    assert (tmp_path / "rel_scan.csv").exists()
    doc = _envelope(out)
    assert doc["results"]["out"] == str(tmp_path / "rel_scan.csv")
