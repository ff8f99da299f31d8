import json
import subprocess
import sys

import numpy as np
import pytest

from pqfi.cli import main
from pqfi.sweep import GridSpec, SweepConfig, manifest_path_for, run_sweep, write_sweep
from pqfi.wigner import HalfInt


def run_cli(*argv):
    return main(list(argv))


class TestSweepCsv:
    def small_config(self, **kw):
        base = dict(
            j_list=(HalfInt(1),),
            d=3,
            n=1,
            law="pancharatnam",
            lambda_grid=GridSpec(1e-3, 1e-1, 3, "log"),
            theta_grid=GridSpec(0.0, 2 * np.pi, 8),
            outputs=("P", "Iperp", "T"),
        )
        base.update(kw)
        return SweepConfig(**base)

    def test_deterministic_output(self):
        a = run_sweep([self.small_config()])
        b = run_sweep([self.small_config()])
        assert a == b

    def test_header_and_row_count(self):
        text = run_sweep([self.small_config()])
        lines = text.strip().split("\n")
        assert lines[0] == "law,j_twice,d,n,lambda,theta,P,Iperp,T"
        assert len(lines) == 1 + 3 * 8

    def test_row_order_lexicographic(self):
        config = self.small_config(j_list=(HalfInt(1), HalfInt(2)))
        lines = run_sweep([config]).strip().split("\n")[1:]
        keys = []
        lam_values = list(config.lambda_grid.values())
        theta_values = list(config.theta_grid.values())
        for line in lines:
            cells = line.split(",")
            keys.append(
                (
                    int(cells[1]),
                    lam_values.index(float(cells[4])),
                    theta_values.index(float(cells[5])),
                )
            )
        assert keys == sorted(keys)

    def test_na_for_floored_probability(self):
        # lam = 0, theta = 0 pins the probability at exactly zero
        config = self.small_config(
            d=2,
            lambda_grid=GridSpec(0.0, 0.0, 1),
            theta_grid=GridSpec(0.0, 2 * np.pi, 4),
            outputs=("P", "IT", "Iperp", "T", "dlambda"),
        )
        lines = run_sweep([config]).strip().split("\n")
        first = lines[1].split(",")
        assert first[6] == "0"  # P stays numeric
        assert first[7:] == ["NA", "NA", "NA", "NA"]
        # other grid points are finite
        assert "NA" not in lines[2]

    def test_floats_round_trip(self):
        text = run_sweep([self.small_config()])
        cells = text.strip().split("\n")[3].split(",")
        lam = float(cells[4])
        assert format(lam, ".17g") == cells[4]

    def test_grid_cap(self):
        with pytest.raises(Exception):
            SweepConfig(
                j_list=(HalfInt(1),),
                d=2,
                n=1,
                law="pancharatnam",
                lambda_grid=GridSpec(0.0, 1.0, 100_000),
                theta_grid=GridSpec(0.0, 1.0, 200),
            )

    def test_manifest_written(self, tmp_path):
        csv_path = str(tmp_path / "out.csv")
        manifest = write_sweep([self.small_config()], csv_path)
        assert manifest == manifest_path_for(csv_path)
        doc = json.loads(open(manifest).read())
        assert doc["tool"] == "pqfi"
        assert doc["panels"][0]["d"] == 3
        assert "p_floor" in doc["tolerances"]


class TestCliCommands:
    def test_landmarks_json(self, capsys):
        code = run_cli("landmarks", "--d", "2", "--lambda", "1e-3")
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["theta_t"] == pytest.approx(5e-4, abs=1e-12)
        assert doc["theta_par"] == pytest.approx(1e-3, abs=1e-12)
        assert doc["baseline"] == 1.0
        assert doc["quantum_advantage"] is False

    def test_landmarks_qudit_advantage(self, capsys):
        code = run_cli("landmarks", "--d", "30", "--lambda", "1e-3")
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["theta_t"] == pytest.approx(1.45e-2, abs=1e-12)
        assert doc["quantum_advantage"] is True

    def test_landmarks_degenerate(self, capsys):
        code = run_cli("landmarks", "--d", "2", "--lambda", "0")
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["degenerate"] is True

    def test_phase_report(self, capsys):
        code = run_cli("phase", "--d", "30", "--lambda", "1e-3")
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["phase"] == pytest.approx(1.45e-2, abs=1e-12)
        assert doc["modulus"] == pytest.approx(doc["visibility_closed_form"], abs=1e-12)

    def test_phase_explicit_law(self, capsys):
        code = run_cli(
            "phase", "--d", "2", "--law", "explicit", "--u-list", "0,2", "--n", "2",
            "--lambda", "0.1",
        )
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["modulus"] == pytest.approx(abs(np.cos(0.2)), abs=1e-12)

    def test_sweep_command(self, tmp_path, capsys):
        out = str(tmp_path / "sweep.csv")
        code = run_cli(
            "sweep", "--j", "1/2", "--d", "2", "--lambda-min", "1e-3", "--lambda-max",
            "1e-2", "--lambda-count", "2", "--theta-count", "5", "--out", out,
        )
        assert code == 0
        lines = open(out).read().strip().split("\n")
        assert len(lines) == 1 + 2 * 5

    def test_fraction_spin_argument(self, capsys):
        code = run_cli("landmarks", "--j", "3/2", "--d", "2", "--lambda", "1e-2")
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["baseline"] == 9.0

    def test_bad_config_exit_code(self, capsys):
        assert run_cli("landmarks", "--d", "1") == 2
        assert run_cli("phase", "--law", "fractional", "--d", "4") == 2
        assert run_cli("figure", "9", "--out", "/tmp/nowhere") == 2

    def test_figure_command(self, tmp_path, capsys):
        out = str(tmp_path)
        code = run_cli("figure", "3", "--out", out)
        assert code == 0
        doc = json.loads(open(tmp_path / "fig3.manifest.json").read())
        assert doc["preset"] == "fig3"
        landmarks = {block["law"]: block for block in doc["landmarks"]}
        assert landmarks["pancharatnam"]["theta_par"] == pytest.approx(1e-3, abs=1e-12)
        assert landmarks["symmetric"]["theta_par"] is None


class TestOracleCheckCommand:
    def test_small_matrix_passes(self, capsys):
        code = run_cli("oracle-check", "--points", "25", "--seed", "42")
        assert code == 0
        out = capsys.readouterr().out
        assert "PASS" in out

    def test_seed_insensitive_verdict(self, capsys):
        assert run_cli("oracle-check", "--points", "25", "--seed", "7") == 0
        assert run_cli("oracle-check", "--points", "25", "--seed", "1234") == 0

    def test_wrong_prefactor_negative_control(self, capsys):
        code = run_cli(
            "oracle-check", "--points", "10", "--seed", "42", "--debug-wrong-prefactor"
        )
        assert code == 1
        out = capsys.readouterr().out
        assert "FAIL" in out


class TestConsoleScript:
    def test_module_entrypoint(self):
        proc = subprocess.run(
            [sys.executable, "-m", "pqfi.cli", "--version"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "pqfi" in proc.stdout
