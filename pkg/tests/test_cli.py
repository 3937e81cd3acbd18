import json
import math
import subprocess
import sys

import numpy as np
import pytest

from levyou.cli import main, parse_grid


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = main(list(argv) + ["--out", str(out)])
    return code, out


class TestEigen:
    def test_cauchy_density(self, tmp_path):
        code, out = run(tmp_path, "eigen", "--mu", "1", "--lambda", "0", "--parity", "even",
                        "--space", "real")
        assert code == 0
        header, d = read_csv(out / "eigen.csv")
        assert header == ["x", "value"]
        assert np.max(np.abs(d[:, 1] - 1 / (math.pi * (1 + d[:, 0] ** 2)))) < 1e-8
        manifest = json.loads((out / "manifest.json").read_text())
        assert set(manifest["outputs"]) == {"eigen.csv"}
        for key in ("argv", "config", "seed", "versions", "wall_time_s"):
            assert key in manifest

    def test_tail_slope(self, tmp_path):
        code, out = run(tmp_path, "eigen", "--mu", "2", "--lambda", "0.5", "--parity", "even",
                        "--space", "real", "--grid", "30:300:40")
        assert code == 0
        _, d = read_csv(out / "eigen.csv")
        slope = np.polyfit(np.log(d[:, 0]), np.log(np.abs(d[:, 1])), 1)[0]
        assert abs(slope + 0.5) < 0.02

    def test_fourier_columns(self, tmp_path):
        code, out = run(tmp_path, "eigen", "--mu", "1", "--lambda", "-1", "--parity", "odd",
                        "--space", "fourier", "--grid", "0.5,1,2")
        header, d = read_csv(out / "eigen.csv")
        assert code == 0 and header == ["k", "re", "im"] and d.shape == (3, 3)

    def test_lambda_guard(self, tmp_path, capsys):
        code, _ = run(tmp_path, "eigen", "--mu", "1", "--lambda", "1.5", "--parity", "even")
        assert code == 2
        assert "lambda < 1" in capsys.readouterr().err


class TestKernel:
    def test_zg_table(self, tmp_path):
        code, out = run(tmp_path, "kernel", "--what", "zg", "--zmin", "-10", "--zmax", "10",
                        "--n", "201")
        header, d = read_csv(out / "zg.csv")
        assert code == 0 and header[:2] == ["z", "zg"]
        assert d[100, 0] == 0.0 and d[100, 1] == 0.0
        neg = d[:, 0] < -3
        assert np.all(d[neg, 4] <= 1 + 1 / (math.sqrt(2 * math.pi) * d[neg, 0] ** 2))

    def test_apply_cauchy(self, tmp_path):
        code, out = run(tmp_path, "kernel", "--what", "apply", "--from", "cauchy",
                        "--grid=-3:3:7")
        _, d = read_csv(out / "apply.csv")
        assert code == 0 and np.max(np.abs(d[:, 1] - d[:, 2])) < 1e-3

    def test_origin_rejected(self, tmp_path):
        code, _ = run(tmp_path, "kernel", "--what", "t1half", "--grid", "0")
        assert code == 2


class TestRelaxCorr:
    def test_quadrature_relax_rates(self, tmp_path):
        code, out = run(tmp_path, "relax", "--mu", "2", "--alpha", "0.6666666666666666", "--x0", "1",
                        "--observables", "cos_half,sin_half", "--taus", "1:4:13",
                        "--window", "1:4")
        assert code == 0
        rates = json.loads((out / "rates.json").read_text())
        assert abs(rates["cos_half"]["rate"] - 2 / 3) < 0.1
        assert abs(rates["sin_half"]["rate"] - 1) < 0.1
        assert rates["cos_half"]["nearest_ladder_rate"] == pytest.approx(2 / 3)
        header, d = read_csv(out / "relax_cos_half.csv")
        assert header == ["tau", "value", "error"] and d.shape == (13, 3)

    def test_quadrature_corr_even_rate(self, tmp_path):
        code, out = run(tmp_path, "corr", "--mu", "0.6667", "--observables", "cos_half",
                        "--taus", "3:8:11", "--window", "3:8")
        assert code == 0
        rate = json.loads((out / "rates.json").read_text())["cos_half"]["rate"]
        assert abs(rate - 2 / 3) < 0.05

    def test_mc_bytes_repeat(self, tmp_path):
        argv = ["relax", "--mu", "2", "--alpha", "0.6666666666666666", "--x0", "1", "--method", "mc",
                "--N", "10000", "--taus", "0:1:11", "--seed", "4", "--observables", "cos_half,sign"]
        main(argv + ["--out", str(tmp_path / "a")])
        main(argv + ["--out", str(tmp_path / "b")])
        for name in ("relax_cos_half.csv", "relax_sign.csv", "rates.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_csv_round_trip(self, tmp_path):
        from levyou.evolve import point_mass
        from levyou.observables import builtin_observable, delta_series
        code, out = run(tmp_path, "relax", "--mu", "1", "--x0", "0.5", "--observables", "cos_half",
                        "--taus", "0:1:3")
        _, d = read_csv(out / "relax_cos_half.csv")
        ref = delta_series(builtin_observable("cos_half"), point_mass(0.5), 1.0, [0, 0.5, 1])
        assert np.array_equal(d[:, 1], ref.values)

    def test_run_length_exit(self, tmp_path, capsys):
        code, _ = run(tmp_path, "corr", "--mu", "1", "--method", "mc", "--T", "100",
                      "--taus", "0:3:31")
        assert code == 2
        assert "required total time >= 300" in capsys.readouterr().err


class TestSimulateReplay:
    def test_simulate(self, tmp_path):
        code, out = run(tmp_path, "simulate", "--mu", "1.5", "--T", "5", "--record", "0.5")
        header, d = read_csv(out / "trajectory.csv")
        assert code == 0 and header == ["t", "x"] and d.shape == (10, 2)
        assert np.allclose(d[:, 0], np.arange(1, 11) * 0.5)

    def test_replay(self, tmp_path):
        code, out = run(tmp_path, "simulate", "--mu", "0.8", "--T", "3", "--seed", "17")
        assert code == 0
        code = main(["replay", str(out / "manifest.json"), "--out", str(tmp_path / "rp")])
        assert code == 0
        report = json.loads((tmp_path / "rp" / "replay.json").read_text())
        assert report["mismatched"] == []

    def test_replay_detects_change(self, tmp_path):
        code, out = run(tmp_path, "simulate", "--mu", "0.8", "--T", "3", "--seed", "17")
        m = json.loads((out / "manifest.json").read_text())
        m["outputs"]["trajectory.csv"] = "0" * 64
        (out / "manifest.json").write_text(json.dumps(m))
        assert main(["replay", str(out / "manifest.json"), "--out", str(tmp_path / "rp")]) == 3


def test_grid_parsing():
    assert np.allclose(parse_grid("0:1:5"), [0, 0.25, 0.5, 0.75, 1])
    assert np.allclose(parse_grid("1,2.5"), [1, 2.5])


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "levyou.cli", "kernel", "--what", "zg", "--n", "11",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "zg.csv").exists()
