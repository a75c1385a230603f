import json
import sys

import pytest

from PolyForge import cli_flow, main as cli
from PolyForge.cli_flow import stated_claims
from PolyForge.polytope import CSV_FIELDS
from PolyForge.presets import WITNESS_IMAGE, get_case
from PolyForge.quotient import build_pair_group

S3_FILE = """
generators = ["a", "b"]
relators = ["a^2", "b^3", "(a*b)^2"]
subgroup = ["a"]
"""

FREE_FILE = """
[free]
generators = ["a", "b"]
relators = []
subgroup = []
"""


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def test_enumerate_json_is_deterministic(capsys, presentation_file):
    path = presentation_file(S3_FILE)
    code, first = run(capsys, "enumerate", "--file", path, "--format", "json", "--no-cache")
    assert code == 0
    summary = json.loads(first)
    assert summary["index"] == 3
    assert summary["normal"] is False
    assert summary["status"] == "complete"
    assert summary["subgroup"] == ["a"]
    _, second = run(capsys, "enumerate", "--file", path, "--format", "json", "--no-cache")
    assert first == second


def test_enumerate_prints_table(capsys, presentation_file):
    path = presentation_file(S3_FILE)
    code, out = run(capsys, "enumerate", "--file", path, "--format", "json", "--print-table")
    assert code == 0
    assert "table" in json.loads(out)


def test_incomplete_enumeration_exits_two(capsys, presentation_file):
    path = presentation_file(FREE_FILE)
    code, _ = run(capsys, "enumerate", "--file", path, "--format", "json", "--limit", "10")
    assert code == 2


def test_rewrite_json(capsys, presentation_file):
    path = presentation_file(S3_FILE)
    code, out = run(capsys, "rewrite", "--file", path, "--format", "json")
    assert code == 0
    result = json.loads(out)
    assert result["index"] == 3
    assert result["schreier_generators"] == 4
    assert result["abelian_invariants"] == [2]


def test_missing_file_exits_three(capsys, tmp_path):
    code, out = run(capsys, "enumerate", "--file", str(tmp_path / "missing.txt"))
    assert code == 3
    assert "Cannot read" in out


def test_malformed_file_exits_three(capsys, presentation_file):
    path = presentation_file('generators = ["a"]\nrelators = ["a^"]\n')
    code, _ = run(capsys, "enumerate", "--file", path, "--format", "json")
    assert code == 3


def test_invalid_modulus_exits_three(capsys):
    code, _ = run(capsys, "family", "--case", "1", "--m", "0")
    assert code == 3


def test_enumerate_needs_input(capsys):
    code, _ = run(capsys, "enumerate", "--format", "json")
    assert code == 3


def test_out_writes_file(capsys, presentation_file, tmp_path):
    path = presentation_file(S3_FILE)
    target = tmp_path / "results" / "s3.json"
    code, out = run(capsys, "enumerate", "--file", path, "--format", "json", "--out", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["index"] == 3


def test_prove_relator(capsys):
    code, out = run(capsys, "prove", "--word", "a^4", "--limit", "1000", "--format", "json")
    assert code == 0
    result = json.loads(out)
    assert result["all_proven"] is True
    assert result["certificates"]["a^4"]["verdict"] == "proven"


def test_no_command_prints_help(capsys):
    code, out = run(capsys)
    assert code == 0
    assert "polyforge" in out


def test_entry_point_exit_code(monkeypatch, presentation_file):
    path = presentation_file(S3_FILE)
    monkeypatch.setattr(sys, "argv", ["polyforge", "enumerate", "--file", path, "--format", "json"])
    with pytest.raises(SystemExit) as exc:
        cli.entry_point()
    assert exc.value.code == 0


def test_entry_point_reports_input_errors(monkeypatch, tmp_path):
    monkeypatch.setattr(sys, "argv", ["polyforge", "enumerate", "--file", str(tmp_path / "nope")])
    with pytest.raises(SystemExit) as exc:
        cli.entry_point()
    assert exc.value.code == 3


def test_run_config_from_args():
    args = cli.build_parser().parse_args(["certify", "--case", "2", "--m", "3", "--workers", "1"])
    rc = cli.run_config_from_args(args)
    assert (rc.command, rc.case, rc.m, rc.workers) == ("certify", 2, 3, 1)
    assert rc.limit is None


@pytest.mark.slow
def test_certify_case_one(capsys):
    code, out = run(capsys, "certify", "--case", "1", "--m", "1", "--format", "json", "--no-cache")
    # stated values that do not reproduce are reported, not fatal
    assert code == 0
    record = json.loads(out)
    assert record["verdict"] == "regular"
    assert record["witness"] is None
    assert record["order"] == 1024
    assert record["type"] == [4, 8]
    assert (record["chi"], record["genus"]) == (-128, 65)
    assert record["solvability"]["solvable"] is True
    claims = {c["claim"]: c for c in record["claims"]}
    assert claims["verdict"] == {
        "claim": "verdict", "expected": "chiral", "observed": "regular", "reproduced": False,
    }
    witness = claims[f"order of {WITNESS_IMAGE}"]
    assert (witness["expected"], witness["observed"], witness["reproduced"]) == (4, 8, False)


def test_stated_claims(case1_coordinates, u):
    g = build_pair_group(get_case(1), 2, case1_coordinates)
    claims = stated_claims(1, 2, g, "chiral", u)
    assert claims == [{"claim": "verdict", "expected": "chiral", "observed": "chiral", "reproduced": True}]
    g = build_pair_group(get_case(1), 1, case1_coordinates)
    claims = stated_claims(1, 1, g, "regular", u)
    assert [c["reproduced"] for c in claims] == [False, False]
    assert claims[1]["observed"] == 8


@pytest.mark.slow
def test_certify_text_warns_about_unreproduced_claims(capsys):
    code, out = run(capsys, "certify", "--case", "1", "--m", "1", "--format", "text", "--no-cache")
    assert code == 0
    assert "Claim not reproduced" in out
    assert "stated chiral" in out


@pytest.mark.slow
def test_certify_csv(capsys):
    code, out = run(capsys, "certify", "--case", "1", "--format", "csv", "--no-cache")
    assert code == 0
    header, row = out.splitlines()
    assert header == ",".join(CSV_FIELDS)
    assert row.startswith("1,1,1024,")


@pytest.mark.slow
def test_mutated_table_fails_certification(capsys):
    code, out = run(capsys, "certify", "--case", "1", "--mutate-table", "--no-cache")
    assert code == 1
    assert "action-relations" in out


def test_command_modules_have_docstrings():
    for module in (cli, cli_flow):
        name = module.__name__.rsplit(".", 1)[-1]
        assert module.__doc__ is not None
        assert module.__doc__.strip().startswith(f"{name}.py")
