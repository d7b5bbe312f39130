"""CLI: subcommands, formats, exit codes, oracle mode."""

import io
import json
from pathlib import Path

import pytest

from quadcsp.cli import (
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    main,
    run,
)
from quadcsp.matrix2d import from_json_obj, to_json_obj

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def invoke(command, path, **kwargs):
    out, err = io.StringIO(), io.StringIO()
    cfg = RunConfig(command=command, input_path=str(path), **kwargs)
    code = run(cfg, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


class TestCheck:
    def test_feasible_fixture(self):
        code, out, _ = invoke("check", FIXTURES / "mixed_feasible.txt")
        assert code == EXIT_OK
        assert out.strip() == "feasible"

    def test_infeasible_fixture(self):
        code, out, _ = invoke("check", FIXTURES / "dbm_infeasible.txt")
        assert code == EXIT_INFEASIBLE
        assert out.strip() == "infeasible"

    def test_json_format(self):
        code, out, _ = invoke(
            "check", FIXTURES / "handshake.txt", fmt="json"
        )
        assert code == EXIT_OK
        assert json.loads(out) == {"feasible": True}

    def test_oracle_agreement(self):
        code, _, err = invoke(
            "check", FIXTURES / "negative_cycle.txt", oracle=True
        )
        assert code == EXIT_INFEASIBLE
        assert "DISAGREEMENT" not in err


class TestClose:
    def test_json_roundtrips_matrix(self):
        code, out, _ = invoke(
            "close", FIXTURES / "mixed_feasible.txt", fmt="json"
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["feasible"] is True
        matrix = from_json_obj(doc["matrix"])
        assert to_json_obj(matrix) == doc["matrix"]

    def test_text_is_delimited(self):
        code, out, _ = invoke("close", FIXTURES / "mixed_feasible.txt")
        assert code == EXIT_OK
        lines = [l for l in out.splitlines() if not l.startswith("#")]
        assert lines and all(len(l.split("\t")) == 3 for l in lines)

    def test_infeasible_exit_code(self):
        code, _, _ = invoke(
            "close", FIXTURES / "negative_cycle.txt", fmt="json"
        )
        assert code == EXIT_INFEASIBLE


class TestSolveCommand:
    def test_handshake_solves_with_witness(self):
        code, out, _ = invoke(
            "solve", FIXTURES / "handshake.txt", fmt="json"
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["feasible"] is True
        assert doc["subclass"] == "Octagon"
        assert doc["exactness"] == "Exact"
        assert doc["witness"] is not None
        assert doc["witness"][0] == "0"
        assert doc["domains"] == [["2", "7"], ["2", "7"]]

    def test_unbounded_without_witness(self):
        code, out, _ = invoke(
            "solve", FIXTURES / "mixed_feasible.txt", fmt="json"
        )
        doc = json.loads(out)
        assert code == EXIT_OK
        assert doc["witness"] is None

    def test_witness_anyway(self):
        code, out, _ = invoke(
            "solve",
            FIXTURES / "mixed_feasible.txt",
            fmt="json",
            witness_anyway=True,
        )
        doc = json.loads(out)
        assert doc["witness"] is not None

    def test_text_format_lines(self):
        code, out, _ = invoke("solve", FIXTURES / "handshake.txt")
        assert code == EXIT_OK
        assert "feasible" in out
        assert "subclass: Octagon / Exact" in out
        assert "witness:" in out


class TestBounds:
    def test_intervals(self):
        code, out, _ = invoke("bounds", FIXTURES / "handshake.txt")
        assert code == EXIT_OK
        assert "x1 in [2, 7]" in out
        assert "x2 in [2, 7]" in out

    def test_infeasible(self):
        code, out, _ = invoke("bounds", FIXTURES / "dbm_infeasible.txt")
        assert code == EXIT_INFEASIBLE


class TestSubclass:
    def test_octagon_exact(self, tmp_path):
        f = tmp_path / "oct.txt"
        f.write_text("x1 + x2 <= 5\n")
        code, out, _ = invoke("subclass", f)
        assert code == EXIT_OK
        assert out.strip() == "Octagon / Exact"

    def test_general_upper_approx(self):
        code, out, _ = invoke("subclass", FIXTURES / "mixed_feasible.txt")
        assert out.strip() == "General / UpperApprox"


class TestExplain:
    def test_negative_cycle_certificate(self):
        code, out, _ = invoke(
            "explain", FIXTURES / "negative_cycle.txt", fmt="json"
        )
        assert code == EXIT_INFEASIBLE
        doc = json.loads(out)
        assert doc["feasible"] is False
        assert doc["cycle"]["coeffs"] == ["1", "1"]
        assert doc["cycle"]["weight"] == "-1"
        assert len(doc["cycle"]["constraints"]) == 2

    def test_feasible_input(self):
        code, out, _ = invoke("explain", FIXTURES / "cycle_unit_coeffs.txt")
        assert code == EXIT_OK
        assert out.strip() == "feasible"

    def test_zero_vector_contradiction(self, tmp_path):
        f = tmp_path / "zero.txt"
        f.write_text("x1 - x1 <= -1\n")
        code, out, _ = invoke("explain", f, fmt="json")
        assert code == EXIT_INFEASIBLE
        doc = json.loads(out)
        assert doc["cycle"]["coeffs"] == ["1"]

    def test_text_certificate(self):
        code, out, _ = invoke("explain", FIXTURES / "dbm_infeasible.txt")
        assert code == EXIT_INFEASIBLE
        assert "negative combination" in out
        assert "< 0" in out

    def test_cycle_size_cap_reported(self, tmp_path):
        # minimal negative cycle has three members; capping enumeration
        # at pairs must still report infeasibility, certificate-less
        f = tmp_path / "three.txt"
        f.write_text("x1 - x2 <= -1\nx2 - x3 <= -1\nx3 - x1 <= -1\n")
        code, out, _ = invoke("explain", f, max_cycle_size=2)
        assert code == EXIT_INFEASIBLE
        assert "no simple-cycle certificate" in out
        code, out, _ = invoke("explain", f, max_cycle_size=3)
        assert code == EXIT_INFEASIBLE
        assert "negative combination" in out


class TestMainEntry:
    def test_missing_file_is_usage_error(self, capsys):
        assert main(["check", "/nonexistent/file.txt"]) == EXIT_USAGE

    def test_parse_error_is_usage_error(self, tmp_path, capsys):
        f = tmp_path / "bad.txt"
        f.write_text("x1 <= 1.5\n")
        assert main(["check", str(f)]) == EXIT_USAGE

    def test_bad_flag_value(self, tmp_path, capsys):
        f = tmp_path / "ok.txt"
        f.write_text("x1 <= 1\n")
        assert main(["check", str(f), "--max-sweeps", "0"]) == EXIT_USAGE

    def test_main_runs_check(self, tmp_path, capsys):
        f = tmp_path / "ok.txt"
        f.write_text("x1 <= 1\n")
        assert main(["check", str(f)]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "feasible"

    def test_explain_list_cap(self, tmp_path, capsys):
        f = tmp_path / "many.txt"
        f.write_text("\n".join(f"x1 <= {k}" for k in range(20)))
        assert main(["explain", str(f)]) == EXIT_USAGE

    def test_comments_only_file(self, tmp_path, capsys):
        f = tmp_path / "empty.txt"
        f.write_text("# nothing here\n\n")
        assert main(["check", str(f)]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "feasible"

    def test_max_sweeps_flag_accepted(self, tmp_path, capsys):
        f = tmp_path / "ok.txt"
        f.write_text("x1 - x2 <= 1\nx2 - x1 <= -2\n")
        assert main(["check", str(f), "--max-sweeps", "50"]) == EXIT_INFEASIBLE


class TestFixtureCorpus:
    """Exit codes over the shipped corpus are a stable contract."""

    @pytest.mark.parametrize(
        "name,expected",
        [
            ("mixed_feasible.txt", EXIT_OK),
            ("cycle_unit_coeffs.txt", EXIT_OK),
            ("cycle_doubled_coeff.txt", EXIT_OK),
            ("handshake.txt", EXIT_OK),
            ("dbm_infeasible.txt", EXIT_INFEASIBLE),
            ("negative_cycle.txt", EXIT_INFEASIBLE),
        ],
    )
    def test_check_exit_codes(self, name, expected):
        code, _, _ = invoke("check", FIXTURES / name, oracle=True)
        assert code == expected

    @pytest.mark.parametrize(
        "name",
        [
            "mixed_feasible.txt",
            "cycle_unit_coeffs.txt",
            "cycle_doubled_coeff.txt",
            "handshake.txt",
        ],
    )
    def test_close_json_roundtrip(self, name):
        code, out, _ = invoke("close", FIXTURES / name, fmt="json")
        doc = json.loads(out)
        matrix = from_json_obj(doc["matrix"])
        assert to_json_obj(matrix) == doc["matrix"]
