"""Evaluation of terms and the enumeration search behind validity and extensions."""
import pytest

from engine.errors import EvaluationError, ValidationError
from engine.logic import (
    counterexample, eval_assertion, evaluate, extension, free_vars, has_hooks, hook_expression, is_valid,
    resolve_frames, satisfiable, solve, unary_extension,
)
from engine.parser import parse_assertion, parse_program
from engine.structure import State
from engine.syntax import Frame, conj, unchanged


def value(text, structure, new, old=None):
    return evaluate(parse_assertion(text), structure, old, new)


class TestEvaluate:
    def test_subtraction_below_zero_is_an_error(self, structure):
        s = structure()
        assert value("5 - x", s, {"x": 3}) == 2
        assert value("x - 3", s, {"x": 3}) == 0
        with pytest.raises(EvaluationError, match="below zero"):
            value("x - 1", s, {"x": 0})

    def test_modular_arithmetic(self, structure):
        s = structure()
        assert value("x (+)[4] 3", s, {"x": 2}) == 1
        assert value("x (-)[4] 3", s, {"x": 2}) == 3

    def test_division_by_zero(self, structure):
        with pytest.raises(EvaluationError):
            value("x div 0", structure(), {"x": 1})
        with pytest.raises(EvaluationError):
            value("x mod 0", structure(), {"x": 1})

    def test_empty_extremes(self, structure):
        with pytest.raises(EvaluationError, match="empty set"):
            value("max({})", structure(), {"x": 0})

    def test_index_out_of_range(self, structure):
        with pytest.raises(EvaluationError):
            value("[x][1]", structure(), {"x": 0})

    def test_collections(self, structure):
        s = structure(names=("x", "y"))
        new = {"x": 1, "y": 2}
        assert value("{x, y} union {3}", s, new) == frozenset({1, 2, 3})
        assert value("#({x, y} without {x})", s, new) == 1
        assert value("[x, y] ++ [y]", s, new) == (1, 2, 2)
        assert value("len([x, y])", s, new) == 2
        assert value("x in {y, 3}", s, new) is False

    def test_hooked_variable_needs_old_state(self, structure):
        with pytest.raises(ValidationError):
            value("'x", structure(), {"x": 0})

    def test_frame_is_not_evaluable(self, structure):
        with pytest.raises(ValidationError):
            evaluate(Frame(), structure(), {"x": 0}, {"x": 0})

    def test_quantifiers(self, structure):
        s = structure()
        assert value("forall y in Val: y <= 3", s, {"x": 0})
        assert not value("exists y in Val: y > x", s, {"x": 3})
        assert value("exists y in Val: y > x", s, {"x": 2})

    def test_non_boolean_condition(self, structure):
        with pytest.raises(EvaluationError):
            eval_assertion(parse_assertion("x and true"), None, {"x": 1}, structure())


class TestRelations:
    def test_composition(self, structure):
        s = structure(names=("x", "y"))
        step = parse_assertion("x = 'x + 1 | x = 'x + 1")
        assert eval_assertion(step, {"x": 0, "y": 0}, {"x": 2, "y": 0}, s)
        assert not eval_assertion(step, {"x": 0, "y": 0}, {"x": 1, "y": 0}, s)

    def test_closure(self, structure):
        s = structure()
        step = parse_assertion("closure(x = 'x + 1)")
        assert eval_assertion(step, {"x": 0}, {"x": 3}, s)
        assert not eval_assertion(step, {"x": 2}, {"x": 1}, s)
        assert not eval_assertion(step, {"x": 1}, {"x": 1}, s)

    def test_reflexive_closure_after_frame_resolution(self, structure):
        s = structure()
        step = resolve_frames(parse_assertion("rclosure(x = 'x + 1)"), {"x"})
        assert eval_assertion(step, {"x": 1}, {"x": 1}, s)

    def test_preserve(self, structure):
        s = structure()
        reach = parse_assertion("preserve(x = 0, x = 'x + 2)")
        assert eval_assertion(reach, None, {"x": 2}, s)
        assert not eval_assertion(reach, None, {"x": 1}, s)

    def test_relation_operators_need_old_state(self, structure):
        with pytest.raises(ValidationError):
            eval_assertion(parse_assertion("closure(x > 'x)"), None, {"x": 0}, structure())


class TestSearch:
    def test_counterexample(self, structure):
        s = structure()
        assert counterexample(parse_assertion("x + 1 > x"), s) is None
        old, new = counterexample(parse_assertion("x < 3"), s)
        assert old is None
        assert new == State({"x": 3})

    def test_binary_counterexample(self, structure):
        old, new = counterexample(parse_assertion("x >= 'x"), structure())
        assert old["x"] > new["x"]

    def test_validity(self, structure):
        s = structure(names=("x", "y"))
        assert is_valid(parse_assertion("x = 'x => 'x = x"), s)
        assert is_valid(parse_assertion("y <= x => x - y <= x"), s)
        assert not is_valid(parse_assertion("y <= x => x - y < x"), s)

    def test_unguarded_subtraction_is_an_error(self, structure):
        with pytest.raises(EvaluationError):
            is_valid(parse_assertion("x - y <= x"), structure(names=("x", "y")))

    def test_guard_decided_after_the_subtraction(self, structure):
        s = structure(names=("x", "y", "z"))
        assert is_valid(parse_assertion("(y <= x or z > 9) => x - y <= x"), s)
        with pytest.raises(EvaluationError):
            is_valid(parse_assertion("(y <= x or z = 1) => x - y <= x"), s)

    def test_satisfiable(self, structure):
        s = structure()
        assert not satisfiable(parse_assertion("x > 'x and x = 0"), s)
        assert satisfiable(parse_assertion("x > 'x and 'x = 2"), s)

    def test_solve_respects_fixed_values(self, structure):
        s = structure(names=("x", "y"))
        found = list(solve([(parse_assertion("x + y = 3"), True)], s, new={"y": 1}, free_new=["x"]))
        assert found == [(None, State({"x": 2, "y": 1}))]

    def test_negated_goal(self, structure):
        s = structure()
        found = [new["x"] for _, new in solve([(parse_assertion("x < 2"), False)], s, free_new=["x"])]
        assert found == [2, 3]


class TestExtensions:
    def test_binary_extension(self, structure):
        s = structure()
        succ = extension(parse_assertion("x = 'x + 1"), ["x"], s)
        assert set(succ) == {State({"x": v}) for v in (0, 1, 2)}
        assert succ[State({"x": 0})] == frozenset({State({"x": 1})})

    def test_extensions_are_cached(self, structure):
        s = structure()
        term = parse_assertion("x >= 'x")
        assert extension(term, ["x"], s) is extension(term, ["x"], s)

    def test_unary_extension(self, structure):
        states = unary_extension(parse_assertion("x < 2"), ["x"], structure())
        assert states == frozenset({State({"x": 0}), State({"x": 1})})


class TestRewriting:
    def test_frames_resolve_against_scope(self):
        assert resolve_frames(Frame(frozenset({"x"})), {"x", "y"}) == unchanged("y")
        assert resolve_frames(Frame(), {"x", "y"}) == conj(unchanged("x"), unchanged("y"))

    def test_hook_expression(self):
        hooked = hook_expression(parse_assertion("x + y"))
        assert has_hooks(hooked)
        assert free_vars(hooked) == frozenset({"x", "y"})

    def test_relations_cannot_be_hooked(self):
        with pytest.raises(ValidationError):
            hook_expression(parse_assertion("closure(x > 'x)"))

    def test_quantified_names_stay_bound(self):
        hooked = hook_expression(parse_assertion("exists y in Val: y = x"))
        assert free_vars(hooked) == frozenset({"x"})
        assert has_hooks(hooked)

    def test_program_variables(self):
        program = parse_program("begin loc t : Val; t := x; y := t end")
        assert free_vars(program) == frozenset({"t", "x", "y"})
