"""Proof-tree checking over the corpus, failure reports and obligation export."""
import pytest

from engine.parser import parse_source
from engine.printer import show_declarations
from engine.proofs import check_proof_tree, discharge_obligation, export_obligations
from engine.rules import VALID, WF, Obligation

from conftest import structure_of


def prove(source, **kwargs):
    return check_proof_tree(source.proof, source.structure, source.lsp_b, **kwargs)


class TestCorpusProofs:
    @pytest.mark.parametrize("name, depth, hybrid", [
        ("skip_adaptation.rg", 1, False),
        ("skip_consequence.rg", 2, False),
        ("sequential_proof.rg", 4, False),
        ("while_proof.rg", 2, True),
        ("buff_done.rg", 2, True),
    ])
    def test_valid_proofs(self, load_corpus, name, depth, hybrid):
        report = prove(load_corpus(name))
        assert report.valid, [f.message for f in report.failures]
        assert report.depth == depth
        assert report.hybrid is hybrid

    def test_failed_obligation(self, load_corpus):
        report = prove(load_corpus("adaptation_attempt.rg"))
        assert not report.valid
        (failure,) = report.failures
        assert failure.path == ("consequence",)
        assert failure.obligation is not None
        assert failure.valuation
        assert report.to_dict()["failures"][0]["path"] == "consequence"

    def test_lsps_rule_on_curly_brackets(self, load_corpus):
        report = prove(load_corpus("lsps_while_curly.rg"))
        assert any("lsps-while: bracket must be square" in f.message for f in report.failures)

    def test_semantic_leaf_out_of_budget(self, load_corpus):
        report = prove(load_corpus("while_proof.rg"), budget=1)
        assert not report.failures
        assert report.exhausted == [("while", "0", "check")]
        assert not report.valid
        assert report.to_dict()["verdict"] == "resource-exceeded"
        assert report.to_dict()["exhausted"] == ["while/0/check"]

    def test_restricted_system_rejects_removal(self, corpus_path):
        text = corpus_path("buff_done.rg").read_text(encoding="utf-8").replace("proof\n", "proof lsp_b\n")
        source = parse_source(text)
        assert source.lsp_b
        report = prove(source)
        assert not report.valid
        assert report.lsp_b
        assert any("restricted system" in f.message for f in report.failures)


class TestObligations:
    def test_discharge(self, source):
        src = source("obligation valid x = 'x => x >= 'x;\nobligation wf x > 'x;\n")
        for kind, assertion in src.obligations:
            assert discharge_obligation(Obligation(kind, assertion, frozenset({"x"}), ("check", 0)), src.structure)

    def test_unknown_kind(self, source):
        src = source("obligation valid true;\n")
        ((_, assertion),) = src.obligations
        with pytest.raises(ValueError):
            discharge_obligation(Obligation("sat", assertion, frozenset({"x"}), ("check", 0)), structure_of())

    def test_wf_failure(self, source):
        src = source("obligation wf x >= 'x;\n")
        ((kind, assertion),) = src.obligations
        assert kind == WF
        assert not discharge_obligation(Obligation(kind, assertion, frozenset({"x"}), ("while", 0)), src.structure)

    def test_export_reads_back(self, load_corpus):
        source = load_corpus("adaptation_attempt.rg")
        failed = prove(source).failed_obligations
        text = export_obligations(failed)
        assert text.startswith("// consequence: ")
        reread = parse_source(show_declarations(source.structure, source.declarations) + "\n" + text)
        assert [assertion for _, assertion in reread.obligations] == [o.assertion for o in failed]
        assert all(kind == VALID for kind, _ in reread.obligations)

    def test_export_of_nothing(self):
        assert export_obligations([]) == ""
