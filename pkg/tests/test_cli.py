import json

import numpy as np
import pytest

from bornsim import cli


def read_csv(path):
    return np.genfromtxt(path, delimiter=",", names=True)


def test_presets_embed_caption_parameters():
    fig1 = cli.PRESETS["fig1"]
    assert (fig1["omega0"], fig1["E_e"], fig1["lambda"], fig1["kappa"]) == (1.0, 0.0, 0.01, 0.001)
    fig2 = cli.PRESETS["fig2"]
    assert (fig2["E_g"], fig2["lambda"]) == (-1.0, 0.01)
    for name in ("fig3a", "fig3b"):
        fig3 = cli.PRESETS[name]
        assert (fig3["E_g"], fig3["lambda"], fig3["coupling"]) == (-1.0, 0.5, "rabi")
    assert cli.PRESETS["finite_t"]["nbar"] == 0.2


def test_config_precedence_flags_over_file_over_preset(tmp_path):
    cfg_file = tmp_path / "run.toml"
    cfg_file.write_text('kappa = 0.002\nweight_l = 0.5\n')
    args = cli.build_parser().parse_args(
        ["run", "--scenario", "fig1", "--config", str(cfg_file), "--weight", "0.25"]
    )
    cfg = cli.merge_config(args)
    assert cfg["kappa"] == 0.002  # file overrides preset
    assert cfg["weight_l"] == 0.25  # flag overrides file
    assert cfg["lambda"] == 0.01  # untouched preset value


def test_unknown_config_key_rejected(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("coupling_strength = 0.1\n")
    assert cli.main(["run", "--config", str(bad)]) == cli.EXIT_CONFIG


def test_invalid_parameter_exits_with_config_error():
    assert cli.main(["run", "--scenario", "custom", "--omega0", "-1"]) == cli.EXIT_CONFIG


def test_stability_violation_exits_with_invariant_error():
    code = cli.main(["run", "--scenario", "custom", "--t_max", "10", "--dt", "0.05"])
    assert code == cli.EXIT_INVARIANT


def test_run_writes_trajectory_and_summary(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    code = cli.main([
        "run", "--scenario", "custom", "--t_max", "500", "--out", str(out),
    ])
    assert code == 0
    header = out.read_text().splitlines()[0]
    assert header == cli.TRAJECTORY_HEADER
    data = read_csv(out)
    assert data["t"][0] == 0.0
    summary = json.loads((tmp_path / "traj.summary.json").read_text())
    for key in ("scenario", "params", "p_measured", "e_accumulated",
                "analytic", "deviations", "convergence"):
        assert key in summary
    assert summary["scenario"] == "custom"
    capsys.readouterr()


def test_run_outputs_are_deterministic(tmp_path, capsys):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out1, out2):
        assert cli.main(["run", "--scenario", "custom", "--t_max", "300",
                         "--out", str(out)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    capsys.readouterr()


def test_run_zero_weight_all_zero_columns(tmp_path, capsys):
    out = tmp_path / "zero.csv"
    assert cli.main(["run", "--scenario", "custom", "--weight", "0",
                     "--t_max", "300", "--out", str(out)]) == 0
    data = read_csv(out)
    for col in ("n_photon", "P_plus", "P_minus", "ReP_pm", "P_meas_cum", "E_acc"):
        assert np.max(np.abs(data[col])) == 0.0
    capsys.readouterr()


def test_run_json_format(tmp_path, capsys):
    out = tmp_path / "traj.json"
    assert cli.main(["run", "--scenario", "custom", "--t_max", "300",
                     "--out", str(out), "--format", "json"]) == 0
    payload = json.loads(out.read_text())
    assert list(payload) == cli.TRAJECTORY_HEADER.split(",")
    capsys.readouterr()


def test_twelve_significant_digit_formatting():
    assert cli._fmt(np.pi) == "3.14159265359"
    assert cli._fmt(1.0) == "1"


def test_converge_pass_on_confined_weak_coupling(capsys):
    # short horizon keeps this quick; fig1 dynamics are confined to n <= 1
    code = cli.main(["converge", "--scenario", "custom", "--t_max", "200"])
    assert code == 0
    assert "CONVERGENCE PASS" in capsys.readouterr().out


def test_converge_fail_on_undertruncated_rabi(capsys):
    code = cli.main([
        "converge", "--scenario", "fig3a", "--n_max", "4", "--t_max", "20",
    ])
    assert code == cli.EXIT_CONVERGENCE
    assert "CONVERGENCE FAIL" in capsys.readouterr().out


def test_unknown_scenario_rejected():
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["run", "--scenario", "fig9"])
