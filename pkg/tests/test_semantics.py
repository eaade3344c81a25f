"""Internal transitions, environment steps and path replay."""
import pytest

from engine.errors import CarrierOverflow
from engine.parser import parse_assertion, parse_program
from engine.semantics import (
    EXTERNAL, INTERNAL, Configuration, Edge, Environment, Interpreter, join, replay_path, successors,
)
from engine.structure import State
from engine.syntax import EPSILON, Skip


@pytest.fixture
def interpreter(structure):
    return Interpreter(structure(names=("x", "y")))


def at(**values):
    return State(values)


class TestInterpreter:
    def test_assignment(self, interpreter):
        assert interpreter.step(parse_program("x := x + 1"), at(x=1, y=0)) == ((EPSILON, at(x=2, y=0)),)

    def test_carrier_overflow(self, interpreter):
        with pytest.raises(CarrierOverflow) as info:
            interpreter.step(parse_program("x := x + 1"), at(x=3, y=0))
        assert info.value.valuation == {"x": 3, "y": 0}

    def test_sequence_keeps_the_rest(self, interpreter):
        ((program, state),) = interpreter.step(parse_program("x := 1; y := 2"), at(x=0, y=0))
        assert program == parse_program("y := 2")
        assert state == at(x=1, y=0)

    def test_if_and_while_do_not_change_state(self, interpreter):
        ((program, state),) = interpreter.step(parse_program("if x = 0 then y := 1 else y := 2 fi"), at(x=0, y=0))
        assert program == parse_program("y := 1") and state == at(x=0, y=0)
        assert interpreter.step(parse_program("while x > 0 do skip od"), at(x=0, y=0)) == ((EPSILON, at(x=0, y=0)),)

    def test_block_enters_its_body(self, interpreter):
        ((program, _),) = interpreter.step(parse_program("begin loc t : Val; skip end"), at(x=0, y=0))
        assert program == Skip()

    def test_parallel_interleaves(self, interpreter):
        steps = interpreter.step(parse_program("{ x := 1 || y := 1 }"), at(x=0, y=0))
        assert set(steps) == {
            (parse_program("y := 1"), at(x=1, y=0)),
            (parse_program("x := 1"), at(x=0, y=1)),
        }

    def test_blocked_await(self, interpreter):
        assert interpreter.step(parse_program("await x = 1 do skip od"), at(x=0, y=0)) == ()

    def test_await_is_atomic(self, interpreter):
        steps = interpreter.step(parse_program("await true do x := 1; y := x + 1 od"), at(x=0, y=0))
        assert steps == ((EPSILON, at(x=1, y=2)),)

    def test_nondeterministic_await_body(self, interpreter):
        steps = interpreter.step(parse_program("await true do { x := 1 || x := 2 } od"), at(x=0, y=0))
        assert {state["x"] for _, state in steps} == {1, 2}

    def test_diverging_await_loops_on_itself(self, interpreter):
        program = parse_program("await true do while true do skip od od")
        assert interpreter.step(program, at(x=0, y=0)) == ((program, at(x=0, y=0)),)

    def test_await_body_that_blocks(self, interpreter):
        program = parse_program("await true do x := 1; await false do skip od od")
        assert interpreter.step(program, at(x=0, y=0)) == ((program, at(x=0, y=0)),)

    def test_terminated_configuration(self, interpreter):
        config = Configuration(EPSILON, at(x=0, y=0))
        assert config.terminated
        assert interpreter.step(EPSILON, config.state) == ()

    def test_join_absorbs_the_empty_program(self):
        program = parse_program("skip")
        assert join(EPSILON, program) == program
        assert join(program, EPSILON) == program


class TestEnvironment:
    def test_steps_follow_the_rely(self, structure):
        environment = Environment(parse_assertion("x >= 'x"), frozenset(), frozenset({"x"}), structure())
        assert environment.steps(at(x=1)) == (at(x=2), at(x=3))

    def test_hidden_variables_do_not_move(self, structure):
        environment = Environment(parse_assertion("true"), frozenset({"x"}), frozenset({"x", "y"}),
                                  structure(names=("x", "y")))
        assert all(target["x"] == 1 for target in environment.steps(at(x=1, y=0)))
        assert len(environment.steps(at(x=1, y=0))) == 3

    def test_variables_outside_the_scope_do_not_move(self, structure):
        environment = Environment(parse_assertion("true"), frozenset(), frozenset({"y"}), structure(names=("x", "y")))
        assert {target["x"] for target in environment.steps(at(x=2, y=0))} == {2}

    def test_allows(self, structure):
        environment = Environment(parse_assertion("x >= 'x"), frozenset(), frozenset({"x"}), structure())
        assert environment.allows(at(x=1), at(x=3))
        assert not environment.allows(at(x=3), at(x=1))

    def test_external_successors_need_an_environment(self, interpreter):
        with pytest.raises(ValueError):
            successors(Configuration(EPSILON, at(x=0, y=0)), EXTERNAL, interpreter)


class TestReplay:
    def setup_method(self):
        from conftest import structure_of

        structure = structure_of()
        self.interpreter = Interpreter(structure)
        self.environment = Environment(parse_assertion("x >= 'x"), frozenset(), frozenset({"x"}), structure)
        program = parse_program("x := x + 1")
        self.start = Configuration(program, at(x=0))
        self.after = Configuration(EPSILON, at(x=1))
        self.later = Configuration(EPSILON, at(x=3))

    def test_internal_then_external(self):
        edges = [Edge(self.start, INTERNAL, self.after), Edge(self.after, EXTERNAL, self.later)]
        assert replay_path(edges, self.interpreter, self.environment)

    def test_stutter_is_accepted(self):
        edges = [Edge(self.after, EXTERNAL, self.after)]
        assert replay_path(edges, self.interpreter, self.environment)

    def test_wrong_target(self):
        wrong = Configuration(EPSILON, at(x=2))
        assert not replay_path([Edge(self.start, INTERNAL, wrong)], self.interpreter, self.environment)

    def test_disallowed_interference(self):
        edges = [Edge(self.later, EXTERNAL, self.after)]
        assert not replay_path(edges, self.interpreter, self.environment)

    def test_broken_chain(self):
        edges = [Edge(self.start, INTERNAL, self.after), Edge(self.start, INTERNAL, self.after)]
        assert not replay_path(edges, self.interpreter, self.environment)

    def test_successor_labels(self):
        following = successors(self.start, INTERNAL, self.interpreter)
        assert following == [(INTERNAL, self.after)]
