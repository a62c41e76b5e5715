import json

import numpy as np
import pytest

from l1sos import from_json_dict, parse_text, to_text, verify
from l1sos.approx import ApproximationResult, SosCertificate, motzkin_like
from l1sos.cli import main
from l1sos.moment import MomentVector, enumerate_basis


@pytest.fixture()
def motzkin_file(tmp_path):
    path = tmp_path / "motzkin.txt"
    path.write_text(to_text(motzkin_like()))
    return path


def result_from_json(data) -> ApproximationResult:
    basis = enumerate_basis(data["y_star"]["n"], data["y_star"]["degree"])
    cert = data["certificate"]
    return ApproximationResult(
        lam=np.array(data["lambda"]),
        rho=data["rho"],
        g=from_json_dict(data["g"]),
        y_star=MomentVector(basis, np.array(data["y_star"]["values"])),
        gram=np.array(data["gram"]),
        certificate=SosCertificate(
            tuple(from_json_dict(q) for q in cert["squares"]),
            tuple(cert["weights"]),
            cert["residual"],
        ),
        solver=None,
    )


class TestApproxCommand:
    def test_table_output(self, motzkin_file, capsys):
        assert main(["approx", "--input", str(motzkin_file), "--degree", "3"]) == 0
        out = capsys.readouterr().out
        assert "rho_d" in out
        assert "1.6178e-02" in out

    def test_json_round_trip(self, motzkin_file, tmp_path):
        out = tmp_path / "report.json"
        code = main(
            ["approx", "--input", str(motzkin_file), "--degree", "3",
             "--format", "json", "--out", str(out)]
        )
        assert code == 0
        data = json.loads(out.read_text())
        assert list(data.keys()) == [
            "command", "d", "lambda", "rho", "g", "y_star", "gram",
            "certificate", "solver_report",
        ]
        assert data["solver_report"]["status"] == "optimal"
        # Re-parse the emitted result and re-run every verification check.
        res = result_from_json(data)
        assert verify(res, parse_text(motzkin_file.read_text()), 3).all_passed

    def test_byte_identical_output(self, motzkin_file, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            assert main(
                ["approx", "--input", str(motzkin_file), "--degree", "3",
                 "--format", "json", "--out", str(p)]
            ) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_full_form_flag(self, motzkin_file, capsys):
        assert main(
            ["approx", "--input", str(motzkin_file), "--degree", "3", "--full-form"]
        ) == 0
        assert "1.6178e-02" in capsys.readouterr().out

    def test_json_input_accepted(self, tmp_path, capsys):
        path = tmp_path / "poly.json"
        path.write_text('{"n": 1, "terms": [{"c": 1.0, "e": [2]}, {"c": 1.0, "e": [0]}]}')
        assert main(["approx", "--input", str(path), "--degree", "1"]) == 0


class TestCheckSosCommand:
    def test_sos_verdict(self, tmp_path, capsys):
        path = tmp_path / "sq.txt"
        path.write_text("1.0 2\n1.0 0\n")  # x^2 + 1, headerless single-variable form
        assert main(["check-sos", "--input", str(path), "--degree", "1"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("SOS")
        assert "^2" in out  # certificate squares printed

    def test_not_sos_verdict(self, motzkin_file, capsys):
        assert main(["check-sos", "--input", str(motzkin_file), "--degree", "3"]) == 0
        out = capsys.readouterr().out
        assert "not SOS" in out

    def test_json_fields(self, motzkin_file, tmp_path):
        out = tmp_path / "check.json"
        main(["check-sos", "--input", str(motzkin_file), "--degree", "3",
              "--format", "json", "--out", str(out)])
        data = json.loads(out.read_text())
        assert data["is_sos"] is False
        assert data["certificate"] is None
        assert data["witness"]["riesz_value"] < -1e-9


class TestBaselineCommand:
    def test_negative_square(self, tmp_path, capsys):
        path = tmp_path / "neg.txt"
        path.write_text("n 1\n-1.0 2\n")
        assert main(["baseline", "--input", str(path), "--degree", "1"]) == 0
        out = capsys.readouterr().out
        assert "epsilon* = 1.000000e+00" in out

    def test_json(self, tmp_path):
        path = tmp_path / "neg.txt"
        path.write_text("n 1\n-1.0 2\n")
        out = tmp_path / "base.json"
        main(["baseline", "--input", str(path), "--degree", "1",
              "--format", "json", "--out", str(out)])
        data = json.loads(out.read_text())
        assert data["epsilon"] == pytest.approx(1.0, abs=1e-6)


class TestReproduceTable1:
    def test_three_rows(self, capsys):
        assert main(["reproduce-table1"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert len(out) == 4  # header + d = 3, 4, 5
        for line, d in zip(out[1:], (3, 4, 5)):
            assert line.strip().startswith(str(d))
        assert "1.6178e-02" in out[1]
        assert "2.1104e-03" in out[2]
        assert "8.7119e-05" in out[3]

    def test_json_rows(self, tmp_path):
        out = tmp_path / "table.json"
        main(["reproduce-table1", "--format", "json", "--out", str(out)])
        data = json.loads(out.read_text())
        assert [row["d"] for row in data["rows"]] == [3, 4, 5]
        assert data["rows"][0]["rho"] == pytest.approx(1.6e-2, rel=0.05)


class TestErrorPaths:
    def test_missing_file(self, capsys):
        assert main(["approx", "--input", "nowhere.txt", "--degree", "3"]) == 1
        assert "cannot read input" in capsys.readouterr().err

    def test_parse_error(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("n 1\n1.0 2\n2.0 2\n")
        assert main(["approx", "--input", str(path), "--degree", "1"]) == 1
        assert "line 3" in capsys.readouterr().err

    def test_degree_too_small(self, motzkin_file, capsys):
        assert main(["approx", "--input", str(motzkin_file), "--degree", "1"]) == 1
        assert "degree bound too small" in capsys.readouterr().err

    def test_unknown_command(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_missing_command(self, capsys):
        assert main([]) == 1

    def test_solver_failure_exit_code(self, motzkin_file, capsys):
        code = main(["approx", "--input", str(motzkin_file), "--degree", "3",
                     "--max-iter", "2"])
        assert code == 2
        assert "solver failure" in capsys.readouterr().err
