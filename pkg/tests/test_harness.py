import os

import numpy as np
import pytest

from awwlab import cli, config as C, harness as H
from awwlab.errors import ConfigError

BASE_CFG = """\
atom.name = ww-ref-2level
bath.name = reference
sim.eps = 0.1
sim.lambda2 = 0.1
sweep.epsilons = 0.2, 0.1, 0.05
sweep.lambda_rule = lambda2=eps
emission.r = 1.0
emission.eps = 0.05
"""


def write_cfg(tmp_path, text=BASE_CFG, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_config_parses_and_rejects():
    cfg = C.parse_config(BASE_CFG + "# trailing comment\n")
    assert cfg["atom.name"] == "ww-ref-2level"
    assert C.get_float(cfg, "sim.eps") == 0.1
    assert C.get_float_list(cfg, "sweep.epsilons") == [0.2, 0.1, 0.05]
    with pytest.raises(ConfigError):
        C.parse_config("atom.name = x\nbath.typo = y\n")
    with pytest.raises(ConfigError):
        C.parse_config("atom.name = ww-ref-2level\n")   # bath.name missing
    with pytest.raises(ConfigError):
        C.parse_config(BASE_CFG + "sim.eps = 0.2\n")    # duplicate
    with pytest.raises(ConfigError):
        C.get_float({"sim.eps": "abc"}, "sim.eps")


def test_builtin_scenarios():
    ref = H.builtin_scenario("ww-ref-2level")
    assert ref.atom.dim == 2 and ref.t_end == 1.0
    const = H.builtin_scenario("ww-const-2level")
    assert const.t_end == 20.0
    assert np.allclose(const.atom.matrix(0.0), const.atom.matrix(13.7))
    with pytest.raises(ConfigError):
        H.builtin_scenario("nope")


def test_lambda_rules():
    assert H._lambda_for("lambda2=eps", 0.04, 0) == pytest.approx(0.2)
    assert H._lambda_for("lambda2=2*eps^3", 0.1, 0) == pytest.approx(
        np.sqrt(2e-3))
    assert H._lambda_for("list:0.5,0.25", 0.1, 1) == 0.25
    with pytest.raises(ConfigError):
        H._lambda_for("lambda2=半", 0.1, 0)


def test_loglog_slope_recovers_power_law():
    xs = np.array([0.2, 0.1, 0.05, 0.025])
    slope, stderr = H.loglog_slope(xs, 3.0 * xs**1.7)
    assert slope == pytest.approx(1.7, abs=1e-12)
    assert stderr < 1e-10


def test_simulate_writes_files(tmp_path):
    cfg = C.load_config(write_cfg(tmp_path))
    out = tmp_path / "out"
    written = H.run_simulate(cfg, str(out), override=True)
    names = {os.path.basename(p) for p in written}
    assert names == {"trajectory_exact.csv", "trajectory_volterra.csv",
                     "trajectory_effective.csv", "trajectory_leading.csv",
                     "comparison.csv"}
    header = open(out / "trajectory_exact.csv").readline().strip().split(",")
    assert header == ["t", "re_z1", "im_z1", "re_z2", "im_z2",
                      "p_1", "p_2", "p_down", "norm_defect"]


def test_sweep_serial_parallel_identical(tmp_path):
    cfg = C.load_config(write_cfg(tmp_path))
    out1, out2 = tmp_path / "s1", tmp_path / "s2"
    res1 = H.run_sweep(cfg, str(out1), override=True, threads=1)
    res2 = H.run_sweep(cfg, str(out2), override=True, threads=2)
    assert open(out1 / "sweep.csv").read() == open(out2 / "sweep.csv").read()
    assert not res1["partial"]
    slope = res1["slopes"]["E_lead"][0]
    assert 0.5 < slope < 1.3
    assert res1["slopes"].keys() == res2["slopes"].keys()


def test_sweep_needs_three_points(tmp_path):
    text = BASE_CFG.replace("0.2, 0.1, 0.05", "0.1")
    cfg = C.load_config(write_cfg(tmp_path, text))
    with pytest.raises(ConfigError):
        H.run_sweep(cfg, str(tmp_path / "x"), override=True)


def test_sweep_flags_failed_points(tmp_path):
    # without the override, every point violates the smallness bound
    cfg = C.load_config(write_cfg(tmp_path))
    res = H.run_sweep(cfg, str(tmp_path / "f"), override=False)
    assert res["partial"]
    body = open(tmp_path / "f" / "sweep.csv").read()
    assert "CouplingValidationError" in body


def test_run_validate(tmp_path):
    cfg = C.parse_config("atom.name = ww-ref-2level\nbath.name = reference\n"
                         "sim.eps = 0.05\nsim.lambda2 = 0.015625\n")
    res = H.run_validate(cfg)
    assert res["ok"] and res["smallness"] == pytest.approx(0.5, abs=1e-6)


def test_cli_exit_codes(tmp_path):
    cfg_path = write_cfg(tmp_path)
    out = str(tmp_path / "cli_out")
    assert cli.main(["simulate", "--config", cfg_path, "--out", out,
                     "--override-smallness"]) == 0
    # numerical failure without override (smallness violated)
    assert cli.main(["simulate", "--config", cfg_path, "--out", out]) == 1
    # config error: unknown key
    bad = write_cfg(tmp_path, BASE_CFG + "bogus.key = 1\n", "bad.cfg")
    assert cli.main(["simulate", "--config", bad, "--out", out]) == 2
    # config error: missing file
    assert cli.main(["simulate", "--config", str(tmp_path / "nope.cfg"),
                     "--out", out]) == 2


def test_cli_regimes_and_emission(tmp_path, capsys):
    cfg_path = write_cfg(tmp_path)
    out = str(tmp_path / "re_out")
    assert cli.main(["regimes", "--config", cfg_path, "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "regimes.csv"))
    assert cli.main(["emission", "--config", cfg_path, "--out", out,
                     "--override-smallness"]) == 0
    text = capsys.readouterr().out
    assert "limit" in text
    assert os.path.exists(os.path.join(out, "spectrum.csv"))


def test_cli_validate_reports(tmp_path, capsys):
    path = write_cfg(tmp_path, "atom.name = ww-ref-2level\n"
                               "bath.name = reference\n"
                               "sim.lambda2 = 0.015625\n", "v.cfg")
    assert cli.main(["validate", "--config", path]) == 0
    assert "smallness" in capsys.readouterr().out
