"""Rule schemas, their side conditions, and soundness of rule instances against the checker."""
import random

import pytest

from engine.checker import EFF, GUAR, Specification, SpecifiedProgram, check, strongest_relations
from engine.errors import SchemaError, SpecificationError
from engine.operators import relation_to_assertion
from engine.parser import parse_assertion as p
from engine.parser import parse_program
from engine.proofs import discharge_obligation
from engine.relations import StateSet
from engine.rules import VALID, RuleName, same, validate_rule_instance
from engine.syntax import Closure, Compose, conj, disj, neg

from conftest import structure_of

EXPRESSIONS = ["x (+)[4] 1", "0", "x", "3 - x", "x div 2"]
PRES = ["true", "x = 0", "x < 2"]
RELIES = ["x = 'x", "x >= 'x", "x <= 'x", "true", "I"]
GUARS = ["true", "x >= 'x", "x = 'x or x = 'x (+)[4] 1", "x = 'x or x = 0", "I"]
EFFECTS = ["true", "x = 'x (+)[4] 1", "x >= 'x", "x = 0", "x != 'x"]


def term(value):
    return p(value) if isinstance(value, str) else value


def spec(pre="true", rely="I", wait="false", guar="true", eff=None, glo=("x",), aux=()):
    eff = eff if eff is not None else rely
    return Specification(
        frozenset(glo), frozenset(aux), term(pre), term(rely), term(wait), term(guar), term(eff),
    )


def assignment(expression, pre, rely, guar, effect):
    eff = f"({rely}) | ({effect}) | ({rely})"
    return SpecifiedProgram(parse_program(f"x := {expression}"), spec(pre, rely, "false", guar, eff))


class TestSchemas:
    def test_skip(self):
        conclusion = SpecifiedProgram(parse_program("skip"), spec(rely="x >= 'x"))
        assert validate_rule_instance(RuleName.SKIP, [], conclusion) == []

    def test_skip_needs_eff_equal_to_rely(self):
        conclusion = SpecifiedProgram(parse_program("skip"), spec(rely="x >= 'x", eff="true"))
        with pytest.raises(SchemaError, match="skip: eff must be"):
            validate_rule_instance(RuleName.SKIP, [], conclusion)

    def test_skip_needs_skip(self):
        with pytest.raises(SchemaError) as info:
            validate_rule_instance(RuleName.SKIP, [], SpecifiedProgram(parse_program("x := 1"), spec()))
        assert (info.value.rule, info.value.field, info.value.expected) == ("skip", "program", "skip")

    def test_assignment_target_must_be_global(self):
        conclusion = SpecifiedProgram(parse_program("y := 1"), spec(eff="I | true | I"))
        with pytest.raises(SchemaError, match="assigned variable must be a member of glo"):
            validate_rule_instance(RuleName.ASSIGNMENT, [], conclusion)

    def test_assignment_eff_shape(self):
        conclusion = SpecifiedProgram(parse_program("x := 1"), spec(eff="true"))
        with pytest.raises(SchemaError, match="assignment: eff must be"):
            validate_rule_instance(RuleName.ASSIGNMENT, [], conclusion)

    def test_premise_count(self):
        conclusion = SpecifiedProgram(parse_program("skip"), spec())
        with pytest.raises(SchemaError, match="premises must be exactly 1"):
            validate_rule_instance(RuleName.CONSEQUENCE, [], conclusion)

    def test_consequence_obligations(self):
        premise = SpecifiedProgram(parse_program("skip"), spec())
        conclusion = SpecifiedProgram(parse_program("skip"), spec(pre="x = 0"))
        obligations = validate_rule_instance(RuleName.CONSEQUENCE, [premise], conclusion)
        assert [o.origin for o in obligations] == [("consequence", j) for j in range(5)]
        assert all(o.kind == VALID for o in obligations)
        assert all(discharge_obligation(o, structure_of()) for o in obligations)

    def test_consequence_cannot_change_the_program(self):
        premise = SpecifiedProgram(parse_program("skip"), spec())
        conclusion = SpecifiedProgram(parse_program("x := 1"), spec())
        with pytest.raises(SchemaError, match="premise 0 program"):
            validate_rule_instance(RuleName.CONSEQUENCE, [premise], conclusion)

    def test_rule_names(self):
        assert RuleName("lsps-while") is RuleName.LSPS_WHILE
        with pytest.raises(ValueError):
            validate_rule_instance("frame", [], SpecifiedProgram(parse_program("skip"), spec()))

    def test_same_ignores_conjunct_order(self):
        assert same(p("x = 0 and x < 2"), p("x < 2 and x = 0 and x = 0"))
        assert not same(p("x = 0"), p("x < 2"))


class TestAssignmentSoundness:
    def setup_method(self):
        self.structure = structure_of(3)

    def proved(self, sp):
        obligations = validate_rule_instance(RuleName.ASSIGNMENT, [], sp)
        return all(discharge_obligation(o, self.structure) for o in obligations)

    def test_increment(self):
        sp = assignment("x (+)[4] 1", "true", "x >= 'x", "x = 'x or x = 'x (+)[4] 1", "x = 'x (+)[4] 1")
        assert self.proved(sp)
        assert check(sp, self.structure).valid

    def test_unprovable_effect(self):
        sp = assignment("0", "true", "I", "true", "x >= 'x")
        assert not self.proved(sp)

    def test_proved_instances_satisfy_their_specification(self):
        rng = random.Random(11)
        proved = 0
        for _ in range(150):
            sp = assignment(
                rng.choice(EXPRESSIONS), rng.choice(PRES), rng.choice(RELIES), rng.choice(GUARS), rng.choice(EFFECTS),
            )
            if self.proved(sp):
                proved += 1
                assert check(sp, self.structure).valid, sp
        assert proved > 0


STATEMENTS = ["x := x (+)[4] 1", "x := 0", "skip", "x := 3 - x", "x := x div 2"]
TESTS = ["x < 2", "x = 0", "x > 1", "true"]
LOOP_TESTS = ["x < 2", "x < 3", "x = 0", "x > 0"]
LOOP_BODIES = ["x := x (+)[4] 1", "x := x div 2", "x := 3", "x := 0", "skip"]
PAR_RELIES = ["true", "true", "x >= 'x", "x <= 'x", "x = 'x"]
PAR_ARMS = ["skip", "x := 3", "x := 0", "x := x (+)[4] 1"]
UNCHANGED = "x = 'x"


def strongest(statement, pre, rely, which=EFF):
    return strongest_relations(parse_program(statement), {"x"}, term(pre), term(rely), which, structure_of(3)).relation


def strongest_eff(statement, pre, rely):
    return relation_to_assertion(strongest(statement, pre, rely))


def strongest_guar(statement, pre, rely):
    return disj(p(UNCHANGED), relation_to_assertion(strongest(statement, pre, rely, GUAR)))


def final_states(statement, pre, rely):
    relation = strongest(statement, pre, rely)
    return relation_to_assertion(StateSet(frozenset({"x"}), frozenset(new for _, new in relation)))


class TestRuleSoundness:
    """Rule instances built from premises that hold; whenever the obligations discharge the conclusion must hold too."""

    def setup_method(self):
        self.structure = structure_of(3)

    def holds(self, sp):
        try:
            return check(sp, self.structure).valid
        except SpecificationError:
            return False

    def sound(self, rule, premises, conclusion):
        if not all(self.holds(premise) for premise in premises):
            return False
        obligations = validate_rule_instance(rule, premises, conclusion)
        if not all(discharge_obligation(o, self.structure) for o in obligations):
            return False
        assert check(conclusion, self.structure).valid, (rule, conclusion)
        return True

    def skip(self, rng):
        rely = rng.choice(RELIES)
        pre = rng.choice(PRES)
        return RuleName.SKIP, [], SpecifiedProgram(parse_program("skip"), spec(pre, rely, guar=rng.choice(GUARS)))

    def consequence(self, rng):
        statement, pre, rely = rng.choice(STATEMENTS), rng.choice(PRES), rng.choice(RELIES)
        guar = strongest_guar(statement, pre, rely)
        eff = strongest_eff(statement, pre, rely)
        premise = SpecifiedProgram(parse_program(statement), spec(pre, rely, "false", guar, eff))

        def either(own, pool):
            return own if rng.random() < 0.5 else rng.choice(pool)

        conclusion = SpecifiedProgram(parse_program(statement), spec(
            either(pre, PRES), either(rely, RELIES), either("false", ["true", "x = 0"]),
            either(guar, GUARS), either(eff, EFFECTS),
        ))
        return RuleName.CONSEQUENCE, [premise], conclusion

    def sequential(self, rng):
        first, second = rng.choice(STATEMENTS), rng.choice(STATEMENTS)
        pre, rely = rng.choice(PRES), rng.choice(RELIES)
        guar = rng.choice(GUARS)
        middle = final_states(first, pre, rely)
        effs = strongest_eff(first, pre, rely), strongest_eff(second, middle, rely)
        premises = [
            SpecifiedProgram(parse_program(first), spec(pre, rely, "false", guar, conj(middle, effs[0]))),
            SpecifiedProgram(parse_program(second), spec(middle, rely, "false", guar, effs[1])),
        ]
        conclusion = SpecifiedProgram(
            parse_program(f"{first}; {second}"), spec(pre, rely, "false", guar, Compose(*effs)),
        )
        return RuleName.SEQUENTIAL, premises, conclusion

    def if_(self, rng):
        # the environment leaves the tested variable alone
        rely = rng.choice(["I", UNCHANGED])
        pre, text = rng.choice(PRES), rng.choice(TESTS)
        test = p(text)
        branches = rng.choice(STATEMENTS), rng.choice(STATEMENTS)
        pres = conj(p(pre), test), conj(p(pre), neg(test))
        eff = disj(*(strongest_eff(b, q, rely) for b, q in zip(branches, pres)))
        guar = disj(*(strongest_guar(b, q, rely) for b, q in zip(branches, pres)))
        premises = [
            SpecifiedProgram(parse_program(b), spec(q, rely, "false", guar, eff)) for b, q in zip(branches, pres)
        ]
        program = parse_program(f"if {text} then {branches[0]} else {branches[1]} fi")
        conclusion = SpecifiedProgram(program, spec(pre, rely, "false", guar, eff))
        return RuleName.IF, premises, conclusion

    def while_(self, rng):
        rely = p(UNCHANGED)
        text, body = rng.choice(LOOP_TESTS), rng.choice(LOOP_BODIES)
        pre, test = p(rng.choice(PRES)), p(text)
        variant = strongest_eff(body, conj(pre, test), rely)
        guar = strongest_guar(body, conj(pre, test), rely)
        premise = SpecifiedProgram(parse_program(body), spec(conj(pre, test), rely, "false", guar, conj(pre, variant)))
        eff = conj(disj(Closure(variant), rely), neg(test))
        program = parse_program(f"while {text} do {body} od")
        return RuleName.WHILE, [premise], SpecifiedProgram(program, spec(pre, rely, "false", guar, eff))

    def await_(self, rng):
        pre, rely = rng.choice(PRES), rng.choice(RELIES)
        text, body = rng.choice(TESTS), rng.choice(STATEMENTS)
        test = p(text)
        inner = strongest_eff(body, conj(p(pre), test), "I")
        premise = SpecifiedProgram(parse_program(body), spec(conj(p(pre), test), "I", "false", "true", inner))
        wait = neg(test) if rng.random() < 0.5 else rng.choice(["true", "false", "x = 0"])
        guar = disj(p(UNCHANGED), inner) if rng.random() < 0.5 else rng.choice(GUARS)
        effect = inner if rng.random() < 0.5 else p(rng.choice(EFFECTS))
        outer = p(rely)
        program = parse_program(f"await {text} do {body} od")
        conclusion = SpecifiedProgram(program, spec(pre, outer, wait, guar, Compose(Compose(outer, effect), outer)))
        return RuleName.AWAIT, [premise], conclusion

    def parallel(self, rng):
        pre = rng.choice(PRES)
        guar = "true" if rng.random() < 0.5 else rng.choice(GUARS)
        arms = rng.choice(PAR_ARMS), rng.choice(PAR_ARMS)
        relies = p(rng.choice(PAR_RELIES)), p(rng.choice(PAR_RELIES))
        effs = [strongest_eff(arm, pre, r) for arm, r in zip(arms, relies)]
        premises = [
            SpecifiedProgram(parse_program(arm), spec(pre, relies[j], "false", conj(p(guar), relies[1 - j]), effs[j]))
            for j, arm in enumerate(arms)
        ]
        program = parse_program(f"{{ {arms[0]} || {arms[1]} }}")
        conclusion = SpecifiedProgram(program, spec(pre, conj(*relies), "false", guar, conj(*effs)))
        return RuleName.PARALLEL, premises, conclusion

    @pytest.mark.slow
    @pytest.mark.parametrize("build", ["skip", "consequence", "sequential", "if_", "while_", "await_", "parallel"])
    def test_conclusions_of_sound_premises_hold(self, build):
        rng = random.Random(build)
        proved = 0
        for _ in range(40):
            rule, premises, conclusion = getattr(self, build)(rng)
            if self.sound(rule, premises, conclusion):
                proved += 1
        assert proved > 0
