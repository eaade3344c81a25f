"""Satisfaction checks, specification validation and strongest relations."""
import pytest

from engine.checker import (
    EFF, GUAR, WAIT, Bracket, Clause, Specification, SpecifiedProgram, Verdict, check, check_invariant,
    check_sat_general, check_sat_noaux, strongest_relations,
)
from engine.errors import EvaluationError, SpecificationError
from engine.parser import parse_assertion as p
from engine.parser import parse_program

ENUM = {"A", "B"}


def spec(pre="true", rely="I", wait="false", guar="true", eff="true", glo=("x",), aux=()):
    return Specification(frozenset(glo), frozenset(aux), p(pre), p(rely), p(wait), p(guar), p(eff))


def specified(text, bracket=Bracket.CURLY, **assertions):
    return SpecifiedProgram(parse_program(text), spec(**assertions), bracket)


class TestCorpusVerdicts:
    def test_counter(self, load_corpus):
        source = load_corpus("counter.rg")
        report = check(source.specified, source.structure)
        assert report.verdict is Verdict.VALID
        assert report.notes and "outside a carrier" in report.notes[0]

    def test_counter_with_wrong_effect(self, load_corpus):
        source = load_corpus("counter_invalid.rg")
        report = check(source.specified, source.structure)
        assert report.verdict is Verdict.INVALID
        assert report.clause is Clause.EFF

    def test_guar_violation_trace(self, load_corpus):
        source = load_corpus("guar_violation.rg")
        report = check(source.specified, source.structure)
        assert report.clause is Clause.GUAR
        assert len(report.counterexample) == 2
        assert report.counterexample[0].source.state["v"] == 0
        assert report.to_dict()["trace_length"] == 2

    def test_buffer_with_witness(self, load_corpus):
        source = load_corpus("buff_done.rg")
        assert check(source.specified, source.structure, source.witness).valid

    def test_witness_that_is_no_augmentation(self, load_corpus):
        source = load_corpus("buff_done.rg")
        witness = parse_program("await true do Done := true; Buff := [B] ++ Buff od", ENUM)
        report = check(source.specified, source.structure, witness)
        assert report.verdict is Verdict.INVALID
        assert report.clause is Clause.AUX_REMOVAL


class TestClauses:
    def test_divergence_breaks_convergence(self, structure):
        report = check(specified("while true do skip od"), structure())
        assert report.clause is Clause.CONVERGENCE
        assert report.counterexample

    def test_square_brackets_allow_divergence(self, structure):
        sp = specified("while true do skip od", Bracket.SQUARE)
        assert check(sp, structure()).valid

    def test_square_await_must_terminate(self, structure):
        sp = specified("await true do while true do skip od od", Bracket.SQUARE)
        assert check(sp, structure()).clause is Clause.LSPS_AWAIT_TERMINATION

    def test_blocking_outside_wait(self, structure):
        report = check(specified("await x = 1 do skip od", pre="x = 0"), structure())
        assert report.clause is Clause.WAIT
        assert report.counterexample == []

    def test_blocking_inside_wait(self, structure):
        assert check(specified("await x = 1 do skip od", pre="x = 0", wait="x = 0"), structure()).valid

    def test_environment_reaches_the_await(self, structure):
        sp = specified("await x = 1 do skip od", pre="x = 0", rely="x >= 'x", wait="x != 1", eff="x = 'x or x > 'x")
        assert check(sp, structure()).valid

    def test_guar(self, structure):
        sp = specified("x := x + 1; x := x + 1", pre="x = 0", guar="x = 'x or x = 'x + 1", eff="x = 'x + 2")
        assert check(sp, structure()).valid
        tighter = specified("x := x + 2", pre="x = 0", guar="x = 'x or x = 'x + 1")
        assert check(tighter, structure()).clause is Clause.GUAR

    def test_budget(self, structure):
        report = check(specified("x := 1; x := 2"), structure(), budget=1)
        assert report.verdict is Verdict.RESOURCE_EXCEEDED
        assert report.to_dict()["verdict"] == "resource-exceeded"


class TestValidation:
    @pytest.mark.parametrize("assertions, message", [
        ({"rely": "x > 'x"}, "rely is not reflexive"),
        ({"rely": "x = 'x or x = 'x + 1"}, "rely is not transitive"),
        ({"guar": "x != 'x"}, "guar is not reflexive"),
        ({"pre": "x = 'x"}, "pre must be unary"),
        ({"eff": "y = 0"}, "outside glo"),
    ])
    def test_malformed_specifications(self, structure, assertions, message):
        with pytest.raises(SpecificationError, match=message):
            check(specified("x := 1", **assertions), structure(names=("x", "y")))

    def test_noaux_rejects_square(self, structure):
        with pytest.raises(SpecificationError):
            check_sat_noaux(specified("skip", Bracket.SQUARE), structure())

    def test_aux_needs_a_witness(self, structure):
        sp = SpecifiedProgram(parse_program("x := 1"), spec(glo=("x",), aux=("y",)))
        with pytest.raises(SpecificationError, match="witness"):
            check_sat_general(sp, None, structure(names=("x", "y")))

    def test_program_globals_must_be_declared(self, structure):
        with pytest.raises(SpecificationError, match="not in glo"):
            check(specified("y := 1"), structure(names=("x", "y")))


class TestInvariant:
    def test_invariant_holds(self, structure):
        sp = specified("x := 1", pre="x = 0")
        assert check_invariant(sp, p("x < 2"), structure()).valid

    def test_invariant_broken(self, structure):
        report = check_invariant(specified("x := 1", pre="x = 0"), p("x = 0"), structure())
        assert report.clause is Clause.INVARIANT
        assert len(report.counterexample) == 1

    def test_invariant_must_be_unary(self, structure):
        with pytest.raises(SpecificationError, match="unary"):
            check_invariant(specified("x := 1"), p("x = 'x"), structure())


class TestStrongest:
    def test_corpus_guar_and_eff(self, load_corpus):
        source = load_corpus("strongest_guar.rg")
        spec_ = source.specification
        args = (source.program, spec_.glo, spec_.pre, spec_.rely)
        assert len(strongest_relations(*args, GUAR, source.structure).relation) == 36
        assert len(strongest_relations(*args, EFF, source.structure).relation) == 55

    def test_wait(self, structure):
        result = strongest_relations(parse_program("await x = 1 do skip od"), {"x"}, p("x = 0"), p("I"), WAIT, structure())
        assert [state["x"] for state in result.relation.to_list()] == [0]

    def test_eff_of_an_assignment(self, structure):
        result = strongest_relations(parse_program("x := 2"), {"x"}, p("x < 2"), p("I"), EFF, structure())
        assert {(a["x"], b["x"]) for a, b in result.relation.pairs} == {(0, 2), (1, 2)}

    def test_rely_must_be_a_preorder(self, structure):
        with pytest.raises(SpecificationError):
            strongest_relations(parse_program("skip"), {"x"}, p("true"), p("x > 'x"), EFF, structure())

    def test_unknown_relation(self, structure):
        with pytest.raises(ValueError):
            strongest_relations(parse_program("skip"), {"x"}, p("true"), p("I"), "rely", structure())

    def test_division_by_zero_is_reported(self, structure):
        with pytest.raises(EvaluationError, match="division by zero"):
            strongest_relations(parse_program("x := x div 0"), {"x"}, p("true"), p("I"), GUAR, structure())

    def test_carrier_overflow_ends_exploration(self, structure):
        result = strongest_relations(parse_program("x := x + 1"), {"x"}, p("x = 3"), p("I"), EFF, structure())
        assert not result.relation.pairs
        assert result.statistics["truncated"] == 1
