from dataclasses import replace

import pytest

from sma_neck.cli import main
from sma_neck.scenario import (
    default_scenario_text,
    dump_scenario,
    load_scenario,
)

FAST = ['--set', 'simulation.duration=0.3 s', '--set', 'simulation.dt=2 ms']


@pytest.fixture(scope="module")
def scenario_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("scenario") / "default.yaml"
    path.write_text(default_scenario_text())
    return path


def test_validate_config_ok(scenario_file, capsys):
    code = main(["validate-config", "--scenario", str(scenario_file)])
    assert code == 0
    assert "ok" in capsys.readouterr().out


def test_validate_config_invariant_violation(tmp_path, capsys):
    broken = default_scenario_text().replace(
        "martensite_start: 35 degC", "martensite_start: 20 degC"
    )
    path = tmp_path / "broken.yaml"
    path.write_text(broken)
    code = main(["validate-config", "--scenario", str(path)])
    assert code == 1
    err = capsys.readouterr().err
    assert err.startswith("error: validation:")
    assert "\n" in err  # machine line plus human explanation


def test_validate_config_missing_file(tmp_path, capsys):
    code = main(["validate-config", "--scenario", str(tmp_path / "nope.yaml")])
    assert code == 1
    assert capsys.readouterr().err.startswith("error: parse:")


def test_simulate_writes_trace_and_summary(scenario_file, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["simulate", "--scenario", str(scenario_file), "--out", str(out), *FAST])
    assert code == 0
    captured = capsys.readouterr().out
    assert "max_theta_deg=" in captured
    assert "final_phi_deg=" in captured
    csv_path = out / "neck_trace.csv"
    assert csv_path.exists()
    assert len(csv_path.read_text().splitlines()) == 151


def test_simulate_with_plots(scenario_file, tmp_path):
    out = tmp_path / "out"
    code = main(
        ["simulate", "--scenario", str(scenario_file), "--out", str(out), "--plots", *FAST]
    )
    assert code == 0
    for panel in ("phi", "theta", "force", "temperature", "xi"):
        assert (out / f"neck_{panel}.svg").exists()


def test_simulate_determinism_byte_identical(scenario_file, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        assert main(["simulate", "--scenario", str(scenario_file), "--out", str(out),
                     "--quiet", *FAST]) == 0
    assert (out_a / "neck_trace.csv").read_bytes() == (out_b / "neck_trace.csv").read_bytes()


def test_override_equivalence(tmp_path):
    # --set must produce the same bytes as editing the file
    edited = default_scenario_text().replace(
        "ambient_temperature: 25 degC", "ambient_temperature: 28 degC"
    )
    edited_path = tmp_path / "edited.yaml"
    edited_path.write_text(edited)
    default_path = tmp_path / "default.yaml"
    default_path.write_text(default_scenario_text())

    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--scenario", str(edited_path), "--out", str(out_a),
                 "--quiet", *FAST]) == 0
    assert main(["simulate", "--scenario", str(default_path), "--out", str(out_b),
                 "--quiet", "--set", "environment.ambient_temperature=28 degC", *FAST]) == 0
    assert (out_a / "neck_trace.csv").read_bytes() == (out_b / "neck_trace.csv").read_bytes()


def test_sweep_table_and_csv(scenario_file, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(
        ["sweep", "--scenario", str(scenario_file), "--out", str(out),
         "--currents", "3,6", "--hold", "0.3", "--set", "simulation.dt=2 ms"]
    )
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split() == ["I_A", "max_theta_deg"]
    csv_lines = (out / "neck_sweep.csv").read_text().splitlines()
    assert csv_lines[0] == "I_A,max_theta_deg"
    assert len(csv_lines) == 3
    theta_3, theta_6 = (float(line.split(",")[1]) for line in csv_lines[1:])
    assert theta_6 > theta_3


def test_sweep_bad_currents(scenario_file, capsys):
    code = main(["sweep", "--scenario", str(scenario_file), "--currents", "4,x",
                 "--hold", "1.0"])
    assert code == 1
    assert capsys.readouterr().err.startswith("error: validation:")


def test_solver_failure_exits_two(scenario_file, tmp_path, capsys):
    code = main(
        ["simulate", "--scenario", str(scenario_file), "--out", str(tmp_path),
         "--set", "simulation.dt=0.5 s", "--set", "simulation.duration=1 s"]
    )
    assert code == 2
    err = capsys.readouterr().err
    assert err.startswith("error: solver:")
    assert "t=" in err


def test_calibrate_requires_section(tmp_path, capsys):
    scenario = load_scenario(default_scenario_text())
    trimmed = dump_scenario(replace(scenario, calibration=None))
    path = tmp_path / "no_cal.yaml"
    path.write_text(trimmed)
    code = main(["calibrate", "--scenario", str(path), "--out", str(tmp_path)])
    assert code == 1
    assert "calibration" in capsys.readouterr().err


def test_unit_override_units_error(scenario_file, capsys):
    code = main(["validate-config", "--scenario", str(scenario_file),
                 "--set", "spring.wire_diameter=0.001"])
    assert code == 1
    assert capsys.readouterr().err.startswith("error: units:")
