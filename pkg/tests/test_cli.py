import csv

import pytest

from rydsrp import cli


def run(args):
    return cli.main([str(a) for a in args])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.mark.slow
def test_run_fig2_writes_expected_columns(tmp_path):
    assert run(["run", "fig2_srp", "--out", tmp_path, "--plot-script"]) == 0
    rows = read_csv(tmp_path / "fig2_srp.csv")
    assert rows[0] == ["t_us", "P00", "P01", "P10", "P11", "P_bright"]
    assert len(rows) > 2
    assert (tmp_path / "fig2_srp.summary.txt").exists()
    assert (tmp_path / "fig2_srp_plot.py").exists()


def test_rerun_is_byte_identical_with_lf_endings(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["run", "fig2_vdw", "--out", a, "--set", "n_samples=101"]) == 0
    assert run(["run", "fig2_vdw", "--out", b, "--set", "n_samples=101"]) == 0
    data = (a / "fig2_vdw.csv").read_bytes()
    assert data == (b / "fig2_vdw.csv").read_bytes()
    assert b"\r\n" not in data
    value = read_csv(a / "fig2_vdw.csv")[1][1]
    assert len(value.replace("-", "").replace(".", "").lstrip("0")) <= 9


def test_override_is_recorded_in_summary(tmp_path):
    assert run(["run", "fig9_dissipative", "--out", tmp_path,
                "--set", "params.gamma_flat=0.01", "--set", "Omega_MHz=0.01", "--no-csv"]) == 0
    text = (tmp_path / "fig9_dissipative.summary.txt").read_text()
    assert "params.gamma_flat = 0.01" in text
    assert "\ngamma_flat = 0.01\n" in text
    assert "Omega_MHz = 0.01  -> Omega = 0.0628318531 rad/us" in text
    assert not (tmp_path / "fig9_dissipative.csv").exists()


def test_unknown_scenario_exit_1(tmp_path, capsys):
    assert run(["run", "nosuch", "--out", tmp_path]) == 1
    assert "nosuch" in capsys.readouterr().err


def test_unknown_override_exit_1(tmp_path):
    assert run(["run", "fig2_vdw", "--out", tmp_path, "--set", "params.bogus=1"]) == 1
    assert run(["run", "fig2_vdw", "--out", tmp_path, "--set", "novalue"]) == 1


def test_check_with_broken_tolerance_exit_3(capsys):
    code = run(["check", "fig9_dissipative", "--set", "tolerance.F_at_check=0"])
    assert code == 3
    out = capsys.readouterr().out
    assert "fig9_dissipative: F_at_check measured" in out


def test_check_passing_scenario_exit_0():
    assert run(["check", "fig2_vdw", "--set", "n_samples=101"]) == 0


def test_sweep_range_gives_33_rows(tmp_path):
    assert run(["sweep", "fig3a_srp_deviation", "--param", "deltaJ_MHz", "--range", "-4:4:0.25",
                "--metric", "gate_fidelity", "--out", tmp_path]) == 0
    rows = read_csv(tmp_path / "fig3a_srp_deviation.sweep.csv")
    assert rows[0] == ["deltaJ_MHz", "gate_fidelity", "status"]
    assert len(rows) == 34
    assert [float(r[0]) for r in rows[1:]] == [-4 + 0.25 * i for i in range(33)]
    assert all(r[2] == "ok" for r in rows[1:])


def test_sweep_jobs_byte_identical(tmp_path):
    outs = []
    for jobs in (1, 8):
        d = tmp_path / f"j{jobs}"
        assert run(["sweep", "fig3a_srp_deviation", "--param", "deltaJ_MHz", "--values",
                    "-2.25,-1,0,1,1.7", "--metric", "gate_fidelity", "--jobs", jobs,
                    "--out", d]) == 0
        outs.append((d / "fig3a_srp_deviation.sweep.csv").read_bytes())
    assert outs[0] == outs[1]


def test_sweep_bad_inputs_exit_1(tmp_path):
    base = ["sweep", "fig3a_srp_deviation", "--out", tmp_path, "--metric", "gate_fidelity"]
    assert run(base + ["--param", "bogus", "--values", "0"]) == 1
    assert run(base + ["--param", "deltaJ_MHz"]) == 1
    assert run(base + ["--param", "deltaJ_MHz", "--range", "1:0:1"]) == 1
    assert run(base + ["--param", "deltaJ_MHz", "--values", "0", "--jobs", "0"]) == 1


def test_list_prints_catalog(capsys):
    assert run(["list"]) == 0
    out = capsys.readouterr().out
    assert len(out.strip().splitlines()) == 13
    assert "Table I" in out


def test_config_file_and_flag_precedence(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[scenario]\nname = fig2_vdw\nn_samples = 101\n\n[params]\nOmega_MHz = 0.03\n\n"
                   "[integrator]\nperiod_divisor = 90\n\n[output]\ndir = %s\nplot_script = yes\n"
                   % (tmp_path / "out"))
    cfg = cli.load_config(ini)
    assert cfg.scenario == "fig2_vdw"
    assert cfg.overrides == {"scenario.n_samples": 101, "params.Omega_MHz": 0.03,
                             "integrator.period_divisor": 90}
    assert cfg.plot_script
    assert run(["run", "--config", ini, "--set", "params.Omega_MHz=0.02"]) == 0
    text = (tmp_path / "out" / "fig2_vdw.summary.txt").read_text()
    assert "params.Omega_MHz = 0.02" in text
    assert "period_divisor = 90" in text
    assert (tmp_path / "out" / "fig2_vdw_plot.py").exists()


def test_malformed_config(tmp_path):
    ini = tmp_path / "bad.ini"
    ini.write_text("[weird]\nx = 1\n")
    with pytest.raises(cli.ConfigError):
        cli.load_config(ini)
    assert run(["run", "--config", ini]) == 1


def test_parse_helpers():
    assert cli.parse_range("-1:1:0.5") == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert cli.parse_value("1,2.5") == (1, 2.5)
    assert cli.parse_value("yes") is True
    assert cli.parse_value("r") == "r"
    assert cli.fmt(1 / 3) == "0.333333333"
