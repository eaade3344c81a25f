"""Rule schemas of the proof system and the obligations they leave open.

``validate_rule_instance`` matches a conclusion and its premises against the
schema of one rule. Structural side conditions are checked here and raise
SchemaError; what the schema leaves to the base logic comes back as a list
of Obligations for the discharge step.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

from .analysis import hid_set
from .checker import Bracket, SpecifiedProgram
from .errors import SchemaError
from .logic import free_vars, hook_expression, identity_frame
from .printer import show
from .removal import Removal
from .syntax import (
    FALSE, TRUE, Apply, Assign, Await, Binder, Block, Closure, Compose, Hooked, If, Par, Preserve, Program,
    Quant, Skip, Term, Var, While, conj, conjuncts, disj, disjuncts, equal, flatten_par, flatten_seq, iff,
    implies, neg, unchanged,
)

logger = logging.getLogger(__name__)


class RuleName(str, Enum):
    CONSEQUENCE = "consequence"
    PRE = "pre"
    ACCESS = "access"
    SKIP = "skip"
    ASSIGNMENT = "assignment"
    BLOCK = "block"
    SEQUENTIAL = "sequential"
    IF = "if"
    WHILE = "while"
    PARALLEL = "parallel"
    PARALLEL_GENERAL = "parallel-general"
    PARALLEL_ALT = "parallel-alt"
    AWAIT = "await"
    ELIMINATION = "elimination"
    EFFECT = "effect"
    GLOBAL = "global"
    AUXILIARY = "auxiliary"
    INTRODUCTION = "introduction"
    LSPS_WHILE = "lsps-while"
    LSPS_AWAIT = "lsps-await"
    CHECK = "check"


VALID = "valid"
WF = "wf"


@dataclass(frozen=True)
class Obligation:
    """A base-logic claim left open by a rule: validity of an assertion, or its well-foundedness."""

    kind: str
    assertion: Term
    scope: FrozenSet[str]
    origin: Tuple[str, int]
    description: str = ""


Premise = Union[SpecifiedProgram, Removal]


@dataclass
class _Instance:
    rule: RuleName
    premises: Sequence[Premise]
    conclusion: SpecifiedProgram
    params: Mapping[str, object]
    obligations: List[Obligation] = field(default_factory=list)

    def fail(self, field_name: str, expected: str):
        raise SchemaError(self.rule.value, field_name, expected)

    def expect(self, condition: bool, field_name: str, expected: str) -> None:
        if not condition:
            self.fail(field_name, expected)

    def oblige(self, kind: str, assertion: Term, description: str, scope=None) -> None:
        self.obligations.append(
            Obligation(
                kind, assertion, frozenset(scope if scope is not None else self.conclusion.spec.scope),
                (self.rule.value, len(self.obligations)), description,
            )
        )

    def specified(self, count: Optional[int] = None) -> List[SpecifiedProgram]:
        programs = [p for p in self.premises if isinstance(p, SpecifiedProgram)]
        if len(programs) != len(self.premises) and self.rule is not RuleName.INTRODUCTION:
            self.fail("premises", "specified programs only")
        if count is not None and len(programs) != count:
            self.fail("premises", f"exactly {count} specified program premise(s)")
        return programs


def same(left: Term, right: Term) -> bool:
    """Structural equality up to associativity, commutativity and idempotence of ∧."""
    return frozenset(conjuncts(left)) == frozenset(conjuncts(right))


def _same_frame(inst: _Instance, premise: SpecifiedProgram, index: int, *, program=True, glo=True, aux=True) -> None:
    conclusion = inst.conclusion
    if program:
        inst.expect(premise.program == conclusion.program, f"premise {index} program", "the conclusion's program")
    if glo:
        inst.expect(premise.spec.glo == conclusion.spec.glo, f"premise {index} glo", "the conclusion's glo set")
    if aux:
        inst.expect(premise.spec.aux == conclusion.spec.aux, f"premise {index} aux", "the conclusion's aux set")


def _same_assertions(inst: _Instance, premise: SpecifiedProgram, index: int, *names: str) -> None:
    ours = inst.conclusion.spec.assertions()
    theirs = premise.spec.assertions()
    for name in names:
        inst.expect(same(theirs[name], ours[name]), f"premise {index} {name}", show(ours[name]))


def _bracket(inst: _Instance, premises: Sequence[SpecifiedProgram]) -> None:
    for index, premise in enumerate(premises):
        inst.expect(premise.bracket is inst.conclusion.bracket, f"premise {index} bracket", inst.conclusion.bracket.value)


def _hooked_preserve(pre: Term, rely: Term) -> Term:
    return Hooked(Preserve(pre, rely))


def _split_rely_eff(inst: _Instance) -> Term:
    """E of an eff-condition shaped R|E|R, in either association."""
    eff, rely = inst.conclusion.spec.eff, inst.conclusion.spec.rely
    expected = f"{show(rely)} | E | {show(rely)}"
    inst.expect(isinstance(eff, Compose), "eff", expected)
    if isinstance(eff.left, Compose) and same(eff.left.left, rely) and same(eff.right, rely):
        return eff.left.right
    if isinstance(eff.right, Compose) and same(eff.left, rely) and same(eff.right.right, rely):
        return eff.right.left
    inst.fail("eff", expected)


def _aux_updates(inst: _Instance) -> List[Term]:
    spec = inst.conclusion.spec
    updates: Mapping[str, Term] = inst.params.get("aux", {}) or {}
    for name, update in updates.items():
        inst.expect(name in spec.aux, f"aux update {name}", "an auxiliary variable of the conclusion")
        inst.expect(free_vars(update) <= spec.glo | {name}, f"aux update {name}", f"an expression over glo ∪ {{{name}}}")
    return [equal(Var(a), hook_expression(updates.get(a, Var(a)))) for a in sorted(spec.aux)]


def _remainder(inst: _Instance, whole: Term, part: Term, field_name: str, connective: str) -> Term:
    """``whole`` minus the conjuncts (or disjuncts) of ``part``."""
    split = conjuncts if connective == "and" else disjuncts
    own, given = list(split(whole)), set(split(part))
    inst.expect(given <= set(own), field_name, f"an extension of {show(part)}")
    rest = [t for t in own if t not in given]
    return conj(*rest) if connective == "and" else disj(*rest)


def _disjointness(inst: _Instance, waits: Sequence[Term], effs: Sequence[Term]) -> None:
    for j, wait in enumerate(waits):
        others = [disj(waits[k], effs[k]) for k in range(len(waits)) if k != j]
        inst.oblige(VALID, neg(conj(wait, *others)), f"arm {j} cannot stay blocked while the others wait or finish")


# ---------------------------------------------------------------- rules


def _consequence(inst: _Instance) -> None:
    (premise,) = inst.specified(1)
    _same_frame(inst, premise, 0)
    _bracket(inst, [premise])
    ours, theirs = inst.conclusion.spec, premise.spec
    inst.oblige(VALID, implies(ours.pre, theirs.pre), "pre-condition strengthened")
    inst.oblige(VALID, implies(ours.rely, theirs.rely), "rely-condition strengthened")
    inst.oblige(VALID, implies(theirs.wait, ours.wait), "wait-condition weakened")
    inst.oblige(VALID, implies(theirs.guar, ours.guar), "guar-condition weakened")
    inst.oblige(VALID, implies(theirs.eff, ours.eff), "eff-condition weakened")


def _pre(inst: _Instance) -> None:
    (premise,) = inst.specified(1)
    _same_frame(inst, premise, 0)
    _bracket(inst, [premise])
    _same_assertions(inst, premise, 0, "pre", "rely", "wait", "guar")
    expected = conj(hook_expression(inst.conclusion.spec.pre), premise.spec.eff)
    inst.expect(same(inst.conclusion.spec.eff, expected), "eff", show(expected))


def _access(inst: _Instance) -> None:
    (premise,) = inst.specified(1)
    _same_frame(inst, premise, 0)
    _bracket(inst, [premise])
    _same_assertions(inst, premise, 0, "pre", "wait", "guar", "eff")
    extra = _remainder(inst, premise.spec.rely, inst.conclusion.spec.rely, "premise 0 rely", "and")
    parts = conjuncts(extra)
    inst.expect(
        len(parts) == 1 and isinstance(parts[0], Apply) and parts[0] == unchanged(getattr(parts[0].args[0], "name", "")),
        "premise 0 rely", "the conclusion's rely ∧ v = 'v",
    )
    name = parts[0].args[0].name
    allowed = hid_set(inst.conclusion.program) & inst.conclusion.spec.glo
    inst.expect(name in allowed, "access variable", "a variable of hid[z] ∩ glo")


def _skip(inst: _Instance) -> None:
    inst.specified(0)
    spec = inst.conclusion.spec
    inst.expect(isinstance(inst.conclusion.program, Skip), "program", "skip")
    inst.expect(same(spec.eff, spec.rely), "eff", show(spec.rely))


def _assignment(inst: _Instance) -> None:
    inst.specified(0)
    program, spec = inst.conclusion.program, inst.conclusion.spec
    inst.expect(isinstance(program, Assign), "program", "an assignment v := r")
    inst.expect(program.var in spec.glo, "assigned variable", "a member of glo")
    effect = _split_rely_eff(inst)
    premise = conj(
        _hooked_preserve(spec.pre, spec.rely),
        equal(Var(program.var), hook_expression(program.expr)),
        identity_frame({program.var} | spec.aux, spec.scope),
        *_aux_updates(inst),
    )
    inst.oblige(VALID, implies(premise, conj(spec.guar, effect)), "the assignment step satisfies guar and eff")


def _block(inst: _Instance) -> None:
    (premise,) = inst.specified(1)
    program, spec = inst.conclusion.program, inst.conclusion.spec
    _bracket(inst, [premise])
    inst.expect(isinstance(program, Block), "program", "a block")
    inst.expect(premise.program == program.body, "premise 0 program", "the block body")
    names = frozenset(d.name for d in program.decls)
    inst.expect(not names & spec.scope, "glo", "a set without the block's locals")
    inst.expect(premise.spec.glo == spec.glo | names, "premise 0 glo", "glo extended with the block's locals")
    inst.expect(premise.spec.aux == spec.aux, "premise 0 aux", "the conclusion's aux set")
    _same_assertions(inst, premise, 0, "pre", "wait", "guar", "eff")
    expected = conj(spec.rely, *(unchanged(n) for n in sorted(names)))
    inst.expect(same(premise.spec.rely, expected), "premise 0 rely", show(expected))


def _sequential(inst: _Instance) -> None:
    first, second = inst.specified(2)
    spec = inst.conclusion.spec
    _bracket(inst, [first, second])
    joined = flatten_seq(first.program) + flatten_seq(second.program)
    inst.expect(joined == flatten_seq(inst.conclusion.program), "program", "the premises' programs in sequence")
    for index, premise in enumerate((first, second)):
        _same_frame(inst, premise, index, program=False)
        _same_assertions(inst, premise, index, "rely", "wait", "guar")
    _same_assertions(inst, first, 0, "pre")
    inst.expect(isinstance(spec.eff, Compose), "eff", "E1 | E2")
    inst.expect(same(first.spec.eff, conj(second.spec.pre, spec.eff.left)), "premise 0 eff", "P2 ∧ E1")
    inst.expect(same(second.spec.eff, spec.eff.right), "premise 1 eff", show(spec.eff.right))


def _if(inst: _Instance) -> None:
    first, second = inst.specified(2)
    program, spec = inst.conclusion.program, inst.conclusion.spec
    _bracket(inst, [first, second])
    inst.expect(isinstance(program, If), "program", "an if statement")
    for index, (premise, branch, test) in enumerate(
        ((first, program.then, program.test), (second, program.orelse, neg(program.test)))
    ):
        _same_frame(inst, premise, index, program=False)
        inst.expect(premise.program == branch, f"premise {index} program", "the matching branch")
        _same_assertions(inst, premise, index, "rely", "wait", "guar", "eff")
        expected = conj(spec.pre, test)
        inst.expect(same(premise.spec.pre, expected), f"premise {index} pre", show(expected))


def _while(inst: _Instance) -> None:
    square = inst.rule is RuleName.LSPS_WHILE
    inst.expect(inst.conclusion.square == square, "bracket", "square" if square else "curly")
    (premise,) = inst.specified(1)
    program, spec = inst.conclusion.program, inst.conclusion.spec
    _bracket(inst, [premise])
    inst.expect(isinstance(program, While), "program", "a while loop")
    _same_frame(inst, premise, 0, program=False)
    inst.expect(premise.program == program.body, "premise 0 program", "the loop body")
    shape = "(Z† ∨ R) ∧ ¬b"
    parts = conjuncts(spec.eff)
    exit_test = neg(program.test)
    inst.expect(len(parts) == 2 and exit_test in parts, "eff", shape)
    loop = parts[0] if parts[1] == exit_test else parts[1]
    options = disjuncts(loop)
    closures = [d for d in options if isinstance(d, Closure)]
    inst.expect(len(closures) >= 1, "eff", shape)
    closure = closures[0]
    rest = disj(*(d for d in options if d is not closure))
    inst.expect(same(rest, spec.rely), "eff", shape)
    variant = closure.body
    _same_assertions(inst, premise, 0, "rely", "wait", "guar")
    inst.expect(same(premise.spec.pre, conj(spec.pre, program.test)), "premise 0 pre", "P ∧ b")
    inst.expect(same(premise.spec.eff, conj(spec.pre, variant)), "premise 0 eff", "P ∧ Z")
    if not square:
        inst.oblige(WF, variant, "the loop variant is well-founded")


def _parallel(inst: _Instance) -> None:
    first, second = inst.specified(2)
    program, spec = inst.conclusion.program, inst.conclusion.spec
    _bracket(inst, [first, second])
    inst.expect(isinstance(program, Par), "program", "a parallel composition")
    waits, effs = [], []
    relies = [first.spec.rely, second.spec.rely]
    for index, (premise, arm) in enumerate(((first, program.left), (second, program.right))):
        _same_frame(inst, premise, index, program=False)
        inst.expect(premise.program == arm, f"premise {index} program", "the matching parallel arm")
        _same_assertions(inst, premise, index, "pre")
        expected_guar = conj(spec.guar, relies[1 - index])
        inst.expect(same(premise.spec.guar, expected_guar), f"premise {index} guar", show(expected_guar))
        waits.append(_remainder(inst, premise.spec.wait, spec.wait, f"premise {index} wait", "or"))
        effs.append(premise.spec.eff)
    inst.expect(same(spec.rely, conj(*relies)), "rely", "R1 ∧ R2")
    inst.expect(same(spec.eff, conj(*effs)), "eff", "E1 ∧ E2")
    inst.oblige(VALID, conj(neg(conj(waits[0], effs[1])), neg(conj(waits[1], effs[0])), neg(conj(waits[0], waits[1]))),
                "the arms release each other")


def _parallel_general(inst: _Instance) -> None:
    premises = inst.specified()
    program, spec = inst.conclusion.program, inst.conclusion.spec
    inst.expect(len(premises) >= 2, "premises", "at least two specified programs")
    _bracket(inst, premises)
    inst.expect(
        flatten_par(program) == tuple(p for premise in premises for p in flatten_par(premise.program)),
        "program", "the parallel composition of the premises' programs",
    )
    relies = [p.spec.rely for p in premises]
    waits, effs = [], []
    for index, premise in enumerate(premises):
        _same_frame(inst, premise, index, program=False)
        _same_assertions(inst, premise, index, "pre")
        expected_guar = conj(spec.guar, *(r for k, r in enumerate(relies) if k != index))
        inst.expect(same(premise.spec.guar, expected_guar), f"premise {index} guar", show(expected_guar))
        waits.append(_remainder(inst, premise.spec.wait, spec.wait, f"premise {index} wait", "or"))
        effs.append(premise.spec.eff)
    inst.expect(same(spec.rely, conj(*relies)), "rely", "the conjunction of the premises' relies")
    inst.expect(same(spec.eff, conj(*effs)), "eff", "the conjunction of the premises' effs")
    _disjointness(inst, waits, effs)


def _parallel_alt(inst: _Instance) -> None:
    first, second = inst.specified(2)
    program, spec = inst.conclusion.program, inst.conclusion.spec
    _bracket(inst, [first, second])
    inst.expect(isinstance(program, Par), "program", "a parallel composition")
    guars = [
        _remainder(inst, p.spec.guar, spec.guar, f"premise {i} guar", "and") for i, p in enumerate((first, second))
    ]
    waits, effs = [], []
    for index, (premise, arm) in enumerate(((first, program.left), (second, program.right))):
        _same_frame(inst, premise, index, program=False)
        inst.expect(premise.program == arm, f"premise {index} program", "the matching parallel arm")
        _same_assertions(inst, premise, index, "pre")
        rely = premise.spec.rely
        other = guars[1 - index]
        expected = "(R ∨ G_other)†"
        inst.expect(isinstance(rely, Closure), f"premise {index} rely", expected)
        inst.expect(
            frozenset(disjuncts(rely.body)) == frozenset(disjuncts(spec.rely)) | frozenset(disjuncts(other)),
            f"premise {index} rely", expected,
        )
        waits.append(_remainder(inst, premise.spec.wait, spec.wait, f"premise {index} wait", "or"))
        effs.append(premise.spec.eff)
    inst.expect(same(spec.eff, conj(*effs)), "eff", "E1 ∧ E2")
    _disjointness(inst, waits, effs)


def _await(inst: _Instance) -> None:
    square = inst.rule is RuleName.LSPS_AWAIT
    inst.expect(inst.conclusion.square == square, "bracket", "square" if square else "curly")
    (premise,) = inst.specified(1)
    program, spec = inst.conclusion.program, inst.conclusion.spec
    inst.expect(isinstance(program, Await), "program", "an await statement")
    inst.expect(premise.bracket is Bracket.CURLY, "premise 0 bracket", "curly")
    _same_frame(inst, premise, 0, program=False)
    inst.expect(premise.program == program.body, "premise 0 program", "the await body")
    body = premise.spec
    inst.expect(same(body.rely, identity_frame((), body.scope)), "premise 0 rely", "I")
    inst.expect(body.wait == FALSE, "premise 0 wait", "false")
    inst.expect(body.guar == TRUE, "premise 0 guar", "true")
    effect = _split_rely_eff(inst)
    reachable = Preserve(spec.pre, spec.rely)
    inst.oblige(VALID, implies(conj(reachable, neg(program.test)), spec.wait), "blocked states satisfy wait")
    inst.oblige(VALID, iff(body.pre, conj(reachable, program.test)), "body pre-condition is P^R ∧ b")
    updates = conj(*_aux_updates(inst), identity_frame(spec.aux, spec.scope))
    inst.oblige(VALID, implies(Compose(body.eff, updates), conj(spec.guar, effect)), "the await step satisfies guar and eff")


def _elimination(inst: _Instance) -> None:
    (premise,) = inst.specified(1)
    spec = inst.conclusion.spec
    _bracket(inst, [premise])
    _same_frame(inst, premise, 0, aux=False)
    removed = premise.spec.aux - spec.aux
    inst.expect(len(removed) == 1 and spec.aux == premise.spec.aux - removed, "aux", "the premise's aux minus one variable")
    (name,) = removed
    expected_pre = Quant("exists", (Binder(name),), premise.spec.pre)
    expected_rely = Quant("forall", (Binder(name, True),), Quant("exists", (Binder(name),), premise.spec.rely))
    inst.expect(spec.pre == expected_pre, "pre", show(expected_pre))
    inst.expect(spec.rely == expected_rely, "rely", show(expected_rely))
    _same_assertions(inst, premise, 0, "wait", "guar", "eff")
    for field_name in ("wait", "guar", "eff"):
        inst.expect(name not in free_vars(spec.assertions()[field_name]), field_name, f"free of {name}")


def _effect(inst: _Instance) -> None:
    (premise,) = inst.specified(1)
    spec = inst.conclusion.spec
    _same_frame(inst, premise, 0)
    _bracket(inst, [premise])
    _same_assertions(inst, premise, 0, "pre", "rely", "wait", "guar")
    expected = conj(premise.spec.eff, Closure(disj(spec.rely, spec.guar)))
    inst.expect(same(spec.eff, expected), "eff", show(expected))


def _global(inst: _Instance) -> None:
    (premise,) = inst.specified(1)
    spec = inst.conclusion.spec
    _bracket(inst, [premise])
    _same_frame(inst, premise, 0, glo=False)
    added = spec.glo - premise.spec.glo
    inst.expect(len(added) == 1 and premise.spec.glo == spec.glo - added, "glo", "the premise's glo plus one variable")
    (name,) = added
    _same_assertions(inst, premise, 0, "pre", "rely", "wait", "eff")
    expected = conj(premise.spec.guar, unchanged(name))
    inst.expect(same(spec.guar, expected), "guar", show(expected))


def _auxiliary(inst: _Instance) -> None:
    (premise,) = inst.specified(1)
    spec = inst.conclusion.spec
    _bracket(inst, [premise])
    _same_frame(inst, premise, 0, aux=False)
    added = spec.aux - premise.spec.aux
    inst.expect(len(added) == 1 and premise.spec.aux == spec.aux - added, "aux", "the premise's aux plus one variable")
    (name,) = added
    _same_assertions(inst, premise, 0, "pre", "rely", "wait", "eff")
    expected = conj(premise.spec.guar, unchanged(name))
    inst.expect(same(spec.guar, expected), "guar", show(expected))


def _introduction(inst: _Instance) -> None:
    removals = [p for p in inst.premises if isinstance(p, Removal)]
    programs = inst.specified()
    inst.expect(len(removals) == 1 and len(programs) == 1, "premises", "one removal and one specified program")
    (removal,), (premise,) = removals, programs
    spec = inst.conclusion.spec
    _bracket(inst, [premise])
    inst.expect(removal.augmented == premise.program, "removal", "the premise's program as the augmented program")
    inst.expect(removal.plain == inst.conclusion.program, "removal", "the conclusion's program as the plain program")
    inst.expect(removal.glo == spec.glo and removal.aux == spec.aux, "removal", "the conclusion's glo and aux sets")
    inst.expect(premise.spec.glo == spec.glo | spec.aux, "premise glo", "glo ∪ aux of the conclusion")
    inst.expect(not premise.spec.aux, "premise aux", "empty")
    _same_assertions(inst, premise, 0, "pre", "rely", "wait", "guar", "eff")


def _check(inst: _Instance) -> None:
    inst.specified(0)


_RULES = {
    RuleName.CONSEQUENCE: _consequence,
    RuleName.PRE: _pre,
    RuleName.ACCESS: _access,
    RuleName.SKIP: _skip,
    RuleName.ASSIGNMENT: _assignment,
    RuleName.BLOCK: _block,
    RuleName.SEQUENTIAL: _sequential,
    RuleName.IF: _if,
    RuleName.WHILE: _while,
    RuleName.PARALLEL: _parallel,
    RuleName.PARALLEL_GENERAL: _parallel_general,
    RuleName.PARALLEL_ALT: _parallel_alt,
    RuleName.AWAIT: _await,
    RuleName.ELIMINATION: _elimination,
    RuleName.EFFECT: _effect,
    RuleName.GLOBAL: _global,
    RuleName.AUXILIARY: _auxiliary,
    RuleName.INTRODUCTION: _introduction,
    RuleName.LSPS_WHILE: _while,
    RuleName.LSPS_AWAIT: _await,
    RuleName.CHECK: _check,
}


def validate_rule_instance(
    rule: RuleName,
    premises: Sequence[Premise],
    conclusion: SpecifiedProgram,
    params: Optional[Mapping[str, object]] = None,
) -> List[Obligation]:
    """Obligations left open by one rule application; SchemaError if the shapes do not match."""
    rule = RuleName(rule)
    inst = _Instance(rule, premises, conclusion, params or {})
    _RULES[rule](inst)
    logger.debug("%s instance leaves %d obligations", rule.value, len(inst.obligations))
    return inst.obligations
