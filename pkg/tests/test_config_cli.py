"""Run-config parsing, echo round-trip and the CLI command surface."""

import json
import os

import pytest

from abtof.cli import main
from abtof.config import RunConfig, load_config, parse_config_text
from abtof.errors import ConfigError


def test_defaults_parse_and_validate():
    config = RunConfig()
    assert config.kinetic_energy_ev == 40.0
    assert len(config.currents_a) == 10
    assert config.force_mode == "force_absent"


def test_parse_overrides():
    config = parse_config_text("""
[apparatus]
kinetic_energy_eV = 60
shots_per_setting = 50
force_mode = force_present

[sweep]
currents_A = 0, 0.002, 0.004
""")
    assert config.kinetic_energy_ev == 60.0
    assert config.shots_per_setting == 50
    assert config.force_mode == "force_present"
    assert config.currents_a == (0.0, 0.002, 0.004)


def test_unknown_section_rejected():
    with pytest.raises(ConfigError):
        parse_config_text("[magnets]\nstrength = 9\n")


def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        parse_config_text("[apparatus]\nflight_time_s = 1\n")


def test_unit_suffixed_key_must_be_numeric():
    with pytest.raises(ConfigError):
        parse_config_text("[apparatus]\njitter_sigma_s = soon\n")


def test_semantic_validation():
    with pytest.raises(ConfigError):
        parse_config_text("[apparatus]\nkinetic_energy_eV = -40\n")
    with pytest.raises(ConfigError):
        parse_config_text("[trajectory]\nimpact_parameter_m = 1e-6\n")
    with pytest.raises(ConfigError):
        parse_config_text("[apparatus]\nforce_mode = sometimes\n")


def test_echo_round_trip():
    config = RunConfig()
    text = config.echo()
    assert parse_config_text(text) == config
    # echo of the parsed echo is byte-identical (normalization idempotent)
    assert parse_config_text(text).echo() == text


def test_load_config_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/run.ini")


@pytest.fixture()
def fast_config(tmp_path):
    """Small sweeps so CLI end-to-end tests stay quick."""
    path = tmp_path / "run.ini"
    path.write_text("""
[apparatus]
seed = 99
shots_per_setting = 50

[sweep]
currents_A = 0, 0.00125, 0.0025, 0.00375, 0.005, 0.00625, 0.0075, 0.00875, 0.01
energies_eV = 20, 40, 60, 80, 100
phase_currents_A = 0.001, 0.01
phase_energies_eV = 40
impact_parameters_m = 5e-3, 5e-2

[verify_force]
lengths_over_radius = 100, 200
d_over_radius = 10
""")
    return str(path)


def run_cli(*argv):
    return main(list(argv))


def test_cli_verify_force(fast_config, tmp_path, capsys):
    out = str(tmp_path / "vf")
    assert run_cli("verify-force", "--config", fast_config, "--out", out) == 0
    lines = (open(os.path.join(out, "force_convergence.csv")).read()
             .strip().splitlines())
    assert lines[0] == "stack_length_over_radius,d_over_radius,rel_error"
    assert len(lines) == 1 + 2
    rel_errors = [float(line.split(",")[2]) for line in lines[1:]]
    assert max(rel_errors) < 0.01
    assert os.path.exists(os.path.join(out, "force_convergence.png"))
    assert os.path.exists(os.path.join(out, "config_echo.ini"))


def test_cli_verify_force_short_stack_fails(tmp_path):
    path = tmp_path / "short.ini"
    path.write_text("[verify_force]\nlengths_over_radius = 2\nd_over_radius = 10\n")
    out = str(tmp_path / "vf")
    assert run_cli("verify-force", "--config", str(path), "--out", out) == 2


def test_cli_verify_force_loose_tolerance_passes(tmp_path):
    path = tmp_path / "loose.ini"
    path.write_text(
        "[verify_force]\nlengths_over_radius = 2\nd_over_radius = 10\n"
        "agreement_tolerance = 1\n"
    )
    out = str(tmp_path / "vf")
    assert run_cli("verify-force", "--config", str(path), "--out", out) == 0


def test_cli_predict_delay(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[sweep]\ncurrents_A = 0, 0.001\n")
    out = str(tmp_path / "pd")
    assert run_cli("predict-delay", "--config", str(path), "--out", out) == 0
    lines = open(os.path.join(out, "delay_line.csv")).read().strip().splitlines()
    assert lines[0] == "current_A,flux_Wb,delay_s,ab_phase_rad"
    assert len(lines) == 3
    zero_row = lines[1].split(",")
    assert float(zero_row[1]) == 0.0 and float(zero_row[2]) == 0.0 and float(zero_row[3]) == 0.0
    one_ma = lines[2].split(",")
    assert abs(float(one_ma[2]) - 3.47e-11) / 3.47e-11 < 1e-3


def test_cli_predict_delay_row_count(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[sweep]\ncurrents_A = 0, 0.001, 0.002, 0.005\n")
    out = str(tmp_path / "pd")
    assert run_cli("predict-delay", "--config", str(path), "--out", out) == 0
    lines = open(os.path.join(out, "delay_line.csv")).read().strip().splitlines()
    assert len(lines) == 5


def test_cli_simulate_force_absent(fast_config, tmp_path, capsys):
    out = str(tmp_path / "sim")
    assert run_cli("simulate", "--config", fast_config, "--out", out) == 0
    printed = capsys.readouterr().out
    assert "verdict: consistent_zero" in printed
    fit = json.loads(open(os.path.join(out, "fit_current.json")).read())
    assert fit["fit"]["verdict"] == "consistent_zero"
    ballistic = json.loads(open(os.path.join(out, "fit_ballistic.json")).read())
    assert abs(ballistic["exponent"] + 0.5) < 0.01
    for name in ("spectra_currents.csv", "spectra_energies.csv",
                 "histograms_currents.json", "histograms_energies.json",
                 "delay_vs_current.png", "tof_spectra.png", "arrival_vs_energy.png"):
        assert os.path.exists(os.path.join(out, name)), name


def test_cli_simulate_force_present(fast_config, tmp_path, capsys):
    out = str(tmp_path / "sim")
    assert run_cli("simulate", "--config", fast_config, "--out", out,
                   "--mode", "force_present") == 0
    assert "verdict: consistent_force" in capsys.readouterr().out


def test_cli_simulate_deterministic(fast_config, tmp_path):
    out = str(tmp_path / "sim")
    assert run_cli("simulate", "--config", fast_config, "--out", out) == 0
    snapshot = {}
    for name in sorted(os.listdir(out)):
        with open(os.path.join(out, name), "rb") as handle:
            snapshot[name] = handle.read()
    assert run_cli("simulate", "--config", fast_config, "--out", out) == 0
    for name, blob in snapshot.items():
        with open(os.path.join(out, name), "rb") as handle:
            assert handle.read() == blob, f"{name} changed between identical runs"


def test_cli_seed_changes_outputs(fast_config, tmp_path):
    out_a = str(tmp_path / "a")
    out_b = str(tmp_path / "b")
    assert run_cli("simulate", "--config", fast_config, "--out", out_a, "--seed", "1") == 0
    assert run_cli("simulate", "--config", fast_config, "--out", out_b, "--seed", "2") == 0
    csv_a = open(os.path.join(out_a, "spectra_currents.csv")).read()
    csv_b = open(os.path.join(out_b, "spectra_currents.csv")).read()
    assert csv_a != csv_b


def test_cli_echo_reproduces_run(fast_config, tmp_path):
    out = str(tmp_path / "sim")
    assert run_cli("simulate", "--config", fast_config, "--out", out) == 0
    echo = os.path.join(out, "config_echo.ini")
    before = open(os.path.join(out, "spectra_currents.csv"), "rb").read()
    assert run_cli("simulate", "--config", echo) == 0
    after = open(os.path.join(out, "spectra_currents.csv"), "rb").read()
    assert before == after


def test_cli_phase_check(fast_config, tmp_path, capsys):
    out = str(tmp_path / "pc")
    assert run_cli("phase-check", "--config", fast_config, "--out", out) == 0
    report = json.loads(open(os.path.join(out, "phase_check.json")).read())
    assert report["max_relative_deviation"] <= 1e-3
    assert report["max_delta_y_spread_over_d"] < 1e-3
    assert len(report["entries"]) == 1 * 2 * 2
    for entry in report["entries"]:
        assert entry["relative_deviation"] <= 1e-3
    assert os.path.exists(os.path.join(out, "phase_check.png"))


def test_cli_phase_check_zero_current_row(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("""
[sweep]
phase_currents_A = 0, 0.001
phase_energies_eV = 40
impact_parameters_m = 5e-3
""")
    out = str(tmp_path / "pc")
    assert run_cli("phase-check", "--config", str(path), "--out", out) == 0
    report = json.loads(open(os.path.join(out, "phase_check.json")).read())
    zero = [e for e in report["entries"] if e["current_A"] == 0.0][0]
    assert zero["ab_phase_rad"] == 0.0
    assert zero["semiclassical_phase_rad"] == 0.0


def test_cli_invalid_config_exits_1(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[apparatus]\nbogus_key = 1\n")
    assert run_cli("simulate", "--config", str(path), "--out", str(tmp_path / "x")) == 1
