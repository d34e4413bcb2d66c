"""End-to-end tests for the command-line interface."""

import json

import pytest

from main import EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, EXIT_REFUSED, parse_budget, parse_degree_fn, run
from errors import InputError

TRIANGLE = {"n": 3, "edges": [{"u": 0, "v": 1}, {"u": 1, "v": 2}, {"u": 0, "v": 2}]}


@pytest.fixture
def triangle_file(tmp_path):
    path = tmp_path / "triangle.json"
    path.write_text(json.dumps(TRIANGLE))
    return str(path)


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


def test_arboricity_command(capsys, triangle_file):
    code, doc = run_json(capsys, ["arboricity", "--input", triangle_file, "--f", "1"])
    assert code == EXIT_OK
    assert doc["arboricity"] == 2
    assert doc["conjecture_bound"] == 3
    assert doc["witness"]["S"] == [0, 1, 2]
    assert doc["certificate"]["kind"] == "plain-forest"


def test_arboricity_without_degree_function_has_no_bound(capsys, triangle_file):
    code, doc = run_json(capsys, ["arboricity", "--input", triangle_file])
    assert code == EXIT_OK
    assert "conjecture_bound" not in doc


def test_fractional_command(capsys, triangle_file):
    code, doc = run_json(capsys, ["fractional", "--input", triangle_file, "--f", "2"])
    assert code == EXIT_OK
    assert doc["a_f*"] == "3/2"


def test_fractional_needs_degree_function(capsys, triangle_file):
    assert run(["fractional", "--input", triangle_file]) == EXIT_INPUT


def test_stats_command(capsys, tmp_path):
    path = tmp_path / "path.json"
    path.write_text(json.dumps({"n": 3, "edges": [{"u": 0, "v": 1, "mult": 2}, {"u": 1, "v": 2}], "f": {"default": 2}}))
    code, doc = run_json(capsys, ["stats", "--input", str(path)])
    assert code == EXIT_OK
    assert doc["girth"] == 2
    assert doc["max_degree"] == 3
    assert doc["delta_f"] == 2
    assert doc["arboricity"] == 2
    assert doc["conjecture_bound"] == 3


def test_counterexample_command_refutes(capsys):
    code, doc = run_json(capsys, ["counterexample", "--t", "2", "--m", "8"])
    assert code == EXIT_OK
    assert doc["verdict"] == "REFUTED"
    assert doc["dual_bound"] == "120/7"
    assert doc["conjecture_bound"] == 17


def test_counterexample_command_without_refutation(capsys):
    code, doc = run_json(capsys, ["counterexample", "--t", "2", "--m", "1"])
    assert code == EXIT_NEGATIVE
    assert doc["verdict"] == "NOT REFUTED"


def test_certify_accepts_and_rejects(capsys, tmp_path, triangle_file):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({
        "kind": "plain-forest",
        "k": 2,
        "assignment": [{"u": 0, "v": 1, "classes": [0]}, {"u": 1, "v": 2, "classes": [0]}, {"u": 0, "v": 2, "classes": [1]}],
    }))
    assert run(["certify", "--input", triangle_file, "--cert", str(good)]) == EXIT_OK
    capsys.readouterr()

    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps({
        "kind": "plain-forest",
        "k": 1,
        "assignment": [{"u": 0, "v": 1, "classes": [0]}, {"u": 1, "v": 2, "classes": [0]}, {"u": 0, "v": 2, "classes": [0]}],
    }))
    code, doc = run_json(capsys, ["certify", "--input", triangle_file, "--cert", str(tampered)])
    assert code == EXIT_NEGATIVE
    assert doc["accepted"] is False
    assert doc["violation"]["kind"] == "cycle"


def test_orient_command_reports_witness(capsys, triangle_file):
    code, doc = run_json(capsys, ["orient", "--input", triangle_file, "--g", "0", "--h", "2"])
    assert code == EXIT_NEGATIVE
    assert doc["feasible"] is False
    assert doc["kind"] == "set-condition"
    assert doc["bound"] == "g"

    code, doc = run_json(capsys, ["orient", "--input", triangle_file, "--g", "1", "--h", "1"])
    assert code == EXIT_OK
    assert doc["feasible"] is True


def test_exact_command_and_budget_refusal(capsys, triangle_file):
    code, doc = run_json(capsys, ["exact", "--input", triangle_file, "--f", "2"])
    assert code == EXIT_OK
    assert doc["value"] == 2
    assert doc["exact"] is True
    assert run(["exact", "--input", triangle_file, "--budget", "max_edges=2"]) == EXIT_REFUSED


def test_decompose_refuses_short_girth(capsys, triangle_file):
    assert run(["decompose", "--input", triangle_file, "--f", "2"]) == EXIT_REFUSED
    code, doc = run_json(capsys, ["decompose", "--input", triangle_file, "--f", "2", "--mode", "trivial"])
    assert code == EXIT_OK
    assert doc["classes"] >= 2


def test_decompose_stats_only_on_request(capsys, triangle_file):
    code, doc = run_json(capsys, ["decompose", "--input", triangle_file, "--f", "2", "--mode", "trivial"])
    assert code == EXIT_OK
    assert "stats" not in doc

    code, doc = run_json(capsys, ["decompose", "--input", triangle_file, "--f", "2", "--mode", "trivial", "--stats"])
    assert code == EXIT_OK
    assert doc["stats"]["classes"] == doc["classes"]


def test_dot_and_text_formats(capsys, triangle_file):
    assert run(["arboricity", "--input", triangle_file, "--format", "dot"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("graph G {")
    assert '0 -- 1 [label="' in out

    assert run(["arboricity", "--input", triangle_file, "--format", "text"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("✅ arboricity = 2")


def test_output_file(tmp_path, triangle_file):
    target = tmp_path / "report.json"
    assert run(["pseudoarboricity", "--input", triangle_file, "--output", str(target)]) == EXIT_OK
    assert json.loads(target.read_text())["pseudoarboricity"] == 1


def test_input_errors(capsys, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"n": 3, "edges": [')
    assert run(["arboricity", "--input", str(broken)]) == EXIT_INPUT

    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps({"n": 3, "edges": [{"u": 0, "v": 1, "weight": 2}]}))
    assert run(["arboricity", "--input", str(extra)]) == EXIT_INPUT

    loop = tmp_path / "loop.json"
    loop.write_text(json.dumps({"n": 3, "edges": [{"u": 1, "v": 1}]}))
    assert run(["arboricity", "--input", str(loop)]) == EXIT_INPUT

    assert run(["arboricity", "--input", str(tmp_path / "missing.json")]) == EXIT_INPUT
    assert "Input error" in capsys.readouterr().err


def test_argument_errors(capsys):
    assert run([]) == EXIT_INPUT
    assert run(["gadget"]) == EXIT_INPUT
    assert run(["reproduce", "nonsense"]) == EXIT_INPUT


def test_flag_parsers():
    f = parse_degree_fn("3,0=5", min_allowed=2)
    assert (f(0), f(1)) == (5, 3)
    with pytest.raises(InputError):
        parse_degree_fn("3,x")
    budget = parse_budget("max_edges=5,time=1.5")
    assert (budget.max_edges, budget.time_limit) == (5, 1.5)
    with pytest.raises(InputError):
        parse_budget("colors=3")


@pytest.mark.parametrize("alias,target", [("gt-ratios", "gadget-ratios"), ("claim-2-2", "forest-bounds")])
def test_reproduce_accepts_alternate_target_names(capsys, alias, target):
    code, doc = run_json(capsys, ["reproduce", alias])
    assert code == EXIT_OK
    assert doc["passed"] is True
    assert doc["reports"][0]["target"] == target
