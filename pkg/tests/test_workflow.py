"""End-to-end runs through the LangGraph workflow: routing, exit codes and rendered reports."""
import asyncio
import json

import pytest

from agents.console import fail, failure_kind
from agents.report_agent.tools import exit_status
from engine.errors import BudgetExceeded, EvaluationError, RGCheckError, SourceSyntaxError
from engine.parser import parse_source
from rgcheck import build_parser, create_initial_state, run_command
from workflow import route_after_parser, route_after_scheduler

DECLARATIONS = "sorts\n  Val = 0..12;\nend\n\nvars\n  v : Val;\nend\n\n"


def run(command, path, json_output=False, **options):
    defaults = {"mode": "auto", "what": "guar", "aux": None, "emit": None, "export_failed": None, "budget": None}
    defaults.update(options)
    return asyncio.run(run_command(command, str(path), defaults, quiet=True, json_output=json_output))


class TestCheck:
    def test_valid(self, corpus_path):
        state = run("check", corpus_path("counter.rg"))
        assert state["exit_code"] == 0
        first = state["output"].splitlines()[0]
        assert first.startswith("verdict: valid (")
        assert first.endswith("configurations clipped at a carrier bound)")
        assert "mode: lsp" in state["output"]
        assert "outside a carrier" in state["output"]

    def test_only_continuation_leaves_the_carrier(self, tmp_path):
        source = tmp_path / "edge.rg"
        source.write_text(DECLARATIONS + "program\n  v := v + 1\nend\n\nspec ({v}, {}) :: (v = 12, I, false, true, false)\n", encoding="utf-8")
        state = run("check", source)
        assert state["exit_code"] == 0
        assert state["output"].splitlines()[0] == "verdict: valid (1 configurations clipped at a carrier bound)"
        assert json.loads(run("check", source, json_output=True)["output"])["clipped"] == 1

    def test_invalid(self, corpus_path):
        state = run("check", corpus_path("counter_invalid.rg"))
        assert state["exit_code"] == 1
        assert "clause: eff" in state["output"]
        assert "trace (" in state["output"]

    def test_json_trace(self, corpus_path):
        state = run("check", corpus_path("guar_violation.rg"), json_output=True)
        report = json.loads(state["output"])
        assert report["verdict"] == "invalid"
        assert report["clause"] == "guar"
        assert report["trace_length"] == 2
        assert report["counterexample"][0]["from"]["state"] == {"v": 0}

    def test_budget(self, corpus_path):
        state = run("check", corpus_path("counter.rg"), budget=1)
        assert state["exit_code"] == 3
        assert "verdict: resource-exceeded" in state["output"]


class TestProve:
    def test_valid_proof(self, corpus_path):
        state = run("prove", corpus_path("skip_consequence.rg"))
        assert state["exit_code"] == 0
        assert "depth: 2" in state["output"]

    def test_failed_obligations_are_exported(self, corpus_path, tmp_path):
        state = run("prove", corpus_path("adaptation_attempt.rg"), export_failed=str(tmp_path / "failed"))
        assert state["exit_code"] == 1
        assert "counterexample:" in state["output"]
        (exported,) = sorted((tmp_path / "failed").glob("*.rg"))
        assert f"exported: {exported}" in state["output"]
        assert len(parse_source(exported.read_text(encoding="utf-8")).obligations) == 1

    def test_standalone_obligations(self, tmp_path, corpus_path):
        state = run("prove", corpus_path("adaptation_attempt.rg"), export_failed=str(tmp_path))
        (exported,) = tmp_path.glob("*.rg")
        rerun = run("prove", exported)
        assert rerun["exit_code"] == 1
        assert "failure at obligation/0" in rerun["output"]

    def test_semantic_leaf_out_of_budget(self, corpus_path):
        state = run("prove", corpus_path("while_proof.rg"), budget=1)
        assert state["exit_code"] == 3
        assert state["output"].startswith("verdict: resource-exceeded")
        assert "budget exhausted at while/0/check" in state["output"]


class TestAnalysis:
    def test_strongest(self, corpus_path):
        state = run("strongest", corpus_path("strongest_guar.rg"))
        assert state["exit_code"] == 0
        assert "strongest guar over v: 36 elements" in state["output"]

    def test_strongest_json(self, corpus_path):
        report = json.loads(run("strongest", corpus_path("strongest_guar.rg"), json_output=True, what="eff")["output"])
        assert report["what"] == "eff"
        assert report["size"] == 55

    def test_erase(self, corpus_path):
        state = run("erase", corpus_path("buff_done.rg"))
        assert state["exit_code"] == 0
        assert "Buff := [A] ++ Buff" in state["output"]
        assert state["report"]["aux"] == ["Done"]

    def test_graph(self, corpus_path, tmp_path):
        target = tmp_path / "guar.dot"
        state = run("graph", corpus_path("guar_violation.rg"), emit=str(target))
        assert state["exit_code"] == 0
        assert target.read_text(encoding="utf-8").startswith("digraph {")
        assert state["report"]["graphs"] == 10
        assert f"to {target}" in state["output"]

    def test_graph_reports_division_by_zero(self, tmp_path):
        source = tmp_path / "div.rg"
        source.write_text(DECLARATIONS + "program\n  v := v div 0\nend\n\nspec ({v}, {}) :: (true, I, false, true, true)\n", encoding="utf-8")
        state = run("graph", source, emit=str(tmp_path / "div.dot"))
        assert state["exit_code"] == 2
        assert "division by zero" in state["output"]
        assert not (tmp_path / "div.dot").exists()


class TestInputErrors:
    def test_unknown_command(self, corpus_path):
        state = run("frobnicate", corpus_path("counter.rg"))
        assert state["exit_code"] == 2
        assert state["output"].startswith("verdict: error")

    def test_empty_file(self, tmp_path):
        empty = tmp_path / "empty.rg"
        empty.write_text("", encoding="utf-8")
        assert run("check", empty)["exit_code"] == 2

    def test_missing_file(self, tmp_path):
        assert run("check", tmp_path / "absent.rg")["exit_code"] == 2

    def test_syntax_error(self, tmp_path):
        broken = tmp_path / "broken.rg"
        broken.write_text("program\n  x := \nend\n", encoding="utf-8")
        state = run("check", broken, json_output=True)
        assert state["exit_code"] == 2
        report = json.loads(state["output"])
        assert report["verdict"] == "error"
        assert report["errors"]

    def test_check_without_spec(self, tmp_path):
        source = tmp_path / "nospec.rg"
        source.write_text("sorts\n  Val = 0..3;\nend\nvars\n  x : Val;\nend\nprogram\n  x := 1\nend\n", encoding="utf-8")
        assert run("check", source)["exit_code"] == 2


class TestRouting:
    def test_scheduler_rejection_skips_the_parser(self):
        assert route_after_scheduler({"should_continue": False}) == "report"
        assert route_after_scheduler({"should_continue": True}) == "parser"

    def test_parser_routes_to_the_recorded_stage(self):
        assert route_after_parser({"should_continue": True, "workflow_step": "prover"}) == "prover"
        assert route_after_parser({"should_continue": True, "workflow_step": "elsewhere"}) == "report"
        assert route_after_parser({"should_continue": False, "workflow_step": "checker"}) == "report"

    def test_initial_state(self):
        state = create_initial_state("check", "a.rg", "text", {"mode": "auto"}, json_output=True)
        assert state["quiet"] is True
        assert state["exit_code"] == 2
        assert state["errors"] == []

    @pytest.mark.parametrize("argv", [["check", "a.rg"], ["strongest", "a.rg", "--what", "eff", "--json"]])
    def test_command_line(self, argv):
        args = build_parser().parse_args(argv)
        assert args.command == argv[0]
        assert args.file == "a.rg"


class TestFailureKinds:
    @pytest.mark.parametrize("exc, kind", [
        (BudgetExceeded(10), "budget"),
        (EvaluationError("division by zero"), "input"),
        (SourceSyntaxError("unexpected token", 1, 2), "input"),
        (RGCheckError("unexpected"), "internal"),
    ])
    def test_kind_of_exception(self, exc, kind):
        assert failure_kind(exc) == kind

    @pytest.mark.parametrize("kind, code", [("budget", 3), ("input", 2), ("internal", 2)])
    def test_failed_stage_exit_code(self, kind, code):
        state = fail({"errors": [], "quiet": True}, "checker", RGCheckError("boom"), kind)
        assert state["error_kind"] == kind
        assert exit_status.invoke({"report": None, "error_kind": state["error_kind"]}) == code
