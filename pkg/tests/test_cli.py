import json

import numpy as np
import pytest

from blochsteer.cli import main

PLANAR_YAML = "a: [-3, -4]\nb: [1, 2]\norder: 1\n"


@pytest.fixture
def planar_config(tmp_path):
    path = tmp_path / "planar.yaml"
    # small solver settings keep the CLI tests quick
    path.write_text(PLANAR_YAML + "grid_panels: 200\nmultistart: 4\n")
    return str(path)


def run(argv):
    return main(argv)


class TestApogee:
    def test_report(self, planar_config, capsys):
        assert run(["apogee", "-c", planar_config]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert abs(doc["apogee"][0] - 0.4079) < 2e-3
        assert abs(doc["apogee"][1] - 0.4493) < 2e-3
        assert doc["config"]["seed"] == 0

    def test_output_file(self, planar_config, tmp_path, capsys):
        out = tmp_path / "apogee.json"
        assert run(["apogee", "-c", planar_config, "-o", str(out)]) == 0
        assert json.loads(out.read_text()) == json.loads(capsys.readouterr().out)


class TestValidate:
    def test_good_model(self, planar_config, capsys):
        assert run(["validate", "-c", planar_config]) == 0
        assert "FAIL" not in capsys.readouterr().out

    def test_expanding_model_fails(self, tmp_path, capsys):
        path = tmp_path / "bad.yaml"
        path.write_text("a: [3, -4]\nb: [1, 2]\n")
        assert run(["validate", "-c", str(path)]) == 2
        assert "FAIL" in capsys.readouterr().out


class TestSolve:
    def test_artifacts(self, planar_config, tmp_path, capsys):
        out = tmp_path / "run"
        assert run(["solve", "-c", planar_config,
                    "--output-dir", str(out)]) == 0
        capsys.readouterr()
        doc = json.loads((out / "solution.json").read_text())
        assert 1.8 < doc["elapsed_time"] < 2.1
        assert doc["nu"] < 1e-4
        header = (out / "trajectory.csv").read_text().splitlines()[0]
        assert header == "x,y,yp,u1,u2,u3,dtdx,f"
        assert (out / "controls.csv").read_text().splitlines()[0] == "x,u1,u2,u3"

    def test_reruns_are_byte_identical(self, planar_config, tmp_path, capsys):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert run(["solve", "-c", planar_config, "--output-dir", str(out1)]) == 0
        assert run(["solve", "-c", planar_config, "--output-dir", str(out2)]) == 0
        capsys.readouterr()
        for name in ("trajectory.csv", "controls.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_flag_overrides_config(self, planar_config, tmp_path, capsys):
        out = tmp_path / "run"
        assert run(["solve", "-c", planar_config, "--output-dir", str(out),
                    "--seed", "3"]) == 0
        capsys.readouterr()
        doc = json.loads((out / "solution.json").read_text())
        assert doc["config"]["seed"] == 3

    def test_missing_order_rejected(self, tmp_path, capsys):
        path = tmp_path / "no_order.yaml"
        path.write_text("a: [-3, -4]\nb: [1, 2]\n")
        assert run(["solve", "-c", str(path)]) == 2

    def test_no_convergence_exit_code(self, tmp_path, capsys):
        path = tmp_path / "strict.yaml"
        path.write_text(PLANAR_YAML
                        + "grid_panels: 200\nmultistart: 2\nnu_tolerance: 1.0e-16\n")
        assert run(["solve", "-c", str(path)]) == 3


class TestSimulate:
    def test_closure(self, planar_config, tmp_path, capsys):
        out = tmp_path / "run"
        assert run(["simulate", "-c", planar_config,
                    "--output-dir", str(out)]) == 0
        capsys.readouterr()
        doc = json.loads((out / "solution.json").read_text())
        assert doc["simulation"]["terminal_error"] < 5e-3
        rows = (out / "simulation.csv").read_text().splitlines()
        assert rows[0] == "t,x,y,u1,u2,u3,purity"
        last = np.array(rows[-1].split(","), dtype=float)
        assert abs(last[0] - doc["simulation"]["elapsed_time"]) < 1e-12


class TestErrors:
    def test_bad_config_file(self, tmp_path, capsys):
        path = tmp_path / "broken.yaml"
        path.write_text("a: [-3, -4]\nunknown_knob: 5\nb: [1, 2]\n")
        assert run(["validate", "-c", str(path)]) == 2
        assert "error" in capsys.readouterr().err
