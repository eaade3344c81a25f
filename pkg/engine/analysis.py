"""Well-formedness of programs and the hid/var/declared analyses."""
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set

from .errors import ValidationError
from .logic import free_vars
from .printer import show
from .sorts import ANY, Sort, join_tags, tags_compatible, type_tag
from .structure import Structure
from .syntax import (
    Apply, Assign, Await, Block, Closure, Compose, Decl, Empty, Frame, Hooked, If, Lit, Node, Par, Preserve,
    Program, Quant, Seq, Skip, Span, Term, Var, While,
)

logger = logging.getLogger(__name__)

REDECLARATION = "redeclaration"
LOCAL_ESCAPE = "local-escape"
SORT_MISMATCH = "sort-mismatch"
INIT_BEFORE_READ = "init-before-read"
BOOLEAN_TEST = "boolean-test"
PROGRAM_EXPRESSION = "program-expression"


@dataclass(frozen=True)
class Violation:
    constraint: str
    message: str
    span: Optional[Span] = None

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}[{self.constraint}] {self.message}"


# ---------------------------------------------------------------- variable sets


def statements(program: Program) -> Iterator[Program]:
    yield program
    if isinstance(program, Block):
        yield from statements(program.body)
    elif isinstance(program, (Seq, Par)):
        first, second = (program.first, program.second) if isinstance(program, Seq) else (program.left, program.right)
        yield from statements(first)
        yield from statements(second)
    elif isinstance(program, If):
        yield from statements(program.then)
        yield from statements(program.orelse)
    elif isinstance(program, (While, Await)):
        yield from statements(program.body)


def declarations(program: Program) -> List[Decl]:
    return [d for s in statements(program) if isinstance(s, Block) for d in s.decls]


def declared(program: Program) -> FrozenSet[str]:
    return frozenset(d.name for d in declarations(program))


def globals_of(program: Program) -> FrozenSet[str]:
    return free_vars(program) - declared(program)


def hid_set(program: Program) -> FrozenSet[str]:
    """Variables declared in the program or read by one of its if/while tests."""
    hidden: Set[str] = set()
    for statement in statements(program):
        if isinstance(statement, Block):
            hidden.update(d.name for d in statement.decls)
        elif isinstance(statement, (If, While)):
            hidden.update(free_vars(statement.test))
    return frozenset(hidden)


def local_sorts(program: Program, structure: Structure) -> Dict[str, Sort]:
    return {d.name: structure.sort(d.sort) for d in declarations(program)}


def assignments(program: Program) -> List[Assign]:
    return [s for s in statements(program) if isinstance(s, Assign)]


# ---------------------------------------------------------------- sort checking


def _literal_tag(value, structure: Structure) -> tuple:
    if isinstance(value, bool):
        return ("bool",)
    if isinstance(value, int):
        return ("nat",)
    if isinstance(value, str):
        sort = structure.enum_constants().get(value)
        if sort is None:
            raise ValidationError(f"unknown constant {value}")
        return ("enum", sort.name)
    if isinstance(value, (tuple, frozenset)):
        inner = ANY
        for item in value:
            inner = join_tags(inner, _literal_tag(item, structure))
        return ("seq" if isinstance(value, tuple) else "set", inner)
    raise ValidationError(f"unsupported literal {value!r}")


_NAT2 = {"+", "-", "*", "div", "mod", "oplus", "ominus"}
_ORDER = {"<", "<=", ">", ">="}
_LOGIC = {"and", "or", "=>", "<=>"}
BOOL_TAG = ("bool",)
NAT_TAG = ("nat",)


class SortChecker:
    """Infers type tags for terms and collects mismatch messages."""

    def __init__(self, structure: Structure, types: Dict[str, tuple]):
        self.structure = structure
        self.types = types
        self.problems: List[str] = []

    def expect(self, term: Term, tag: tuple, bound: Dict[str, tuple]) -> None:
        found = self.infer(term, bound)
        if not tags_compatible(found, tag):
            self.problems.append(f"expected {_show(tag)}, found {_show(found)} in {_describe(term)}")

    def infer(self, term: Term, bound: Optional[Dict[str, tuple]] = None) -> tuple:
        bound = bound or {}
        if isinstance(term, Var):
            if term.name in bound:
                return bound[term.name]
            if term.name not in self.types:
                raise ValidationError(f"unknown variable {term.name}")
            return self.types[term.name]
        if isinstance(term, Lit):
            return _literal_tag(term.value, self.structure)
        if isinstance(term, Quant):
            inner = dict(bound)
            for binder in term.binders:
                if binder.sort is not None:
                    inner[binder.name] = type_tag(self.structure.sort(binder.sort))
                elif binder.name in self.types:
                    inner[binder.name] = self.types[binder.name]
                else:
                    raise ValidationError(f"quantified variable {binder.name} has no sort")
            self.expect(term.body, BOOL_TAG, inner)
            return BOOL_TAG
        if isinstance(term, Compose):
            self.expect(term.left, BOOL_TAG, bound)
            self.expect(term.right, BOOL_TAG, bound)
            return BOOL_TAG
        if isinstance(term, Closure):
            self.expect(term.body, BOOL_TAG, bound)
            return BOOL_TAG
        if isinstance(term, Preserve):
            self.expect(term.base, BOOL_TAG, bound)
            self.expect(term.step, BOOL_TAG, bound)
            return BOOL_TAG
        if isinstance(term, Hooked):
            return self.infer(term.body, bound)
        if isinstance(term, Frame):
            return BOOL_TAG
        return self._infer_apply(term, bound)

    def _infer_apply(self, term: Apply, bound) -> tuple:
        op, args = term.op, term.args
        if op in _NAT2:
            for arg in args:
                self.expect(arg, NAT_TAG, bound)
            return NAT_TAG
        if op in _ORDER:
            for arg in args:
                self.expect(arg, NAT_TAG, bound)
            return BOOL_TAG
        if op in ("=", "!="):
            left, right = (self.infer(a, bound) for a in args)
            if not tags_compatible(left, right):
                self.problems.append(f"cannot compare {_show(left)} with {_show(right)} in {_describe(term)}")
            return BOOL_TAG
        if op == "not" or op in _LOGIC:
            for arg in args:
                self.expect(arg, BOOL_TAG, bound)
            return BOOL_TAG
        if op == "len":
            self._container(args[0], "seq", bound)
            return NAT_TAG
        if op == "card":
            self._container(args[0], "set", bound)
            return NAT_TAG
        if op in ("max", "min"):
            inner = self._container(args[0], "set", bound)
            if not tags_compatible(inner, NAT_TAG):
                self.problems.append(f"{op} needs a set of naturals in {_describe(term)}")
            return NAT_TAG
        if op == "index":
            inner = self._container(args[0], "seq", bound)
            self.expect(args[1], NAT_TAG, bound)
            return inner
        if op in ("seq", "set"):
            inner = ANY
            for arg in args:
                tag = self.infer(arg, bound)
                if not tags_compatible(inner, tag):
                    self.problems.append(f"mixed element sorts in {_describe(term)}")
                inner = join_tags(inner, tag)
            return (op, inner)
        if op in ("concat", "union", "inter", "without"):
            kind = "seq" if op == "concat" else "set"
            left = self._container(args[0], kind, bound)
            right = self._container(args[1], kind, bound)
            if not tags_compatible(left, right):
                self.problems.append(f"mixed element sorts in {_describe(term)}")
            return (kind, join_tags(left, right))
        if op == "in":
            element = self.infer(args[0], bound)
            inner = self._container(args[1], "set", bound)
            if not tags_compatible(element, inner):
                self.problems.append(f"membership of {_show(element)} in set of {_show(inner)}")
            return BOOL_TAG
        raise ValidationError(f"unknown operator {op}")

    def _container(self, term: Term, kind: str, bound) -> tuple:
        tag = self.infer(term, bound)
        if tag == ANY:
            return ANY
        if tag[0] != kind:
            self.problems.append(f"expected a {kind}, found {_show(tag)} in {_describe(term)}")
            return ANY
        return tag[1]


def _show(tag: tuple) -> str:
    if len(tag) == 1:
        return tag[0]
    if tag[0] == "enum":
        return tag[1]
    return f"{tag[0]}({_show(tag[1])})"


def _describe(node: Node) -> str:
    return show(node)


def check_assertion(assertion: Term, structure: Structure, variables: Iterable[str]) -> List[str]:
    """Sort problems of an assertion whose free variables must lie in ``variables``."""
    types = {name: type_tag(structure.sort_of(name)) for name in variables if structure.declares(name)}
    checker = SortChecker(structure, types)
    checker.expect(assertion, BOOL_TAG, {})
    return checker.problems


# ---------------------------------------------------------------- validation


def _is_program_expression(term: Term) -> bool:
    if isinstance(term, (Quant, Compose, Closure, Preserve, Hooked, Frame)):
        return False
    if isinstance(term, Var):
        return not term.hooked
    if isinstance(term, Apply):
        return all(_is_program_expression(a) for a in term.args)
    return True


class _Validator:
    def __init__(self, program: Program, structure: Structure):
        self.program = program
        self.structure = structure
        self.violations: List[Violation] = []
        self.all_locals = declared(program)

    def report(self, constraint: str, message: str, span: Optional[Span]) -> None:
        self.violations.append(Violation(constraint, message, span))

    def run(self) -> List[Violation]:
        self._redeclarations()
        globals_types = {n: type_tag(s) for n, s in self.structure.variables.items()}
        self._scoped(self.program, globals_types, None)
        self._initialisation(self.program, set(), set())
        return self.violations

    def _redeclarations(self) -> None:
        counts = Counter(d.name for d in declarations(self.program))
        reported = set()
        for decl in declarations(self.program):
            if decl.name in self.structure.variables and decl.name not in reported:
                self.report(REDECLARATION, f"local {decl.name} shadows a global variable", decl.span)
                reported.add(decl.name)
            elif counts[decl.name] > 1 and decl.name not in reported:
                self.report(REDECLARATION, f"{decl.name} is declared more than once", decl.span)
                reported.add(decl.name)

    def _term(self, term: Term, types: Dict[str, tuple], expected: Optional[tuple], span) -> Optional[tuple]:
        if not _is_program_expression(term):
            self.report(PROGRAM_EXPRESSION, "program expressions may not use hooks, quantifiers or relation operators", span)
            return None
        for name in free_vars(term):
            if name not in types:
                self._unknown(name, span)
                return None
        checker = SortChecker(self.structure, types)
        tag = checker.infer(term)
        for problem in checker.problems:
            self.report(SORT_MISMATCH, problem, span)
        if expected is not None and not tags_compatible(tag, expected):
            self.report(SORT_MISMATCH, f"expected {_show(expected)}, found {_show(tag)}", span)
        return tag

    def _unknown(self, name: str, span) -> None:
        if name in self.all_locals:
            self.report(LOCAL_ESCAPE, f"local {name} used outside its block", span)
        else:
            raise ValidationError(f"unknown variable {name}" + (f" at {span}" if span else ""))

    def _test(self, term: Term, types, arm: Optional[FrozenSet[str]], span) -> None:
        self._term(term, types, BOOL_TAG, span)
        if arm is not None:
            outside = sorted(free_vars(term) - arm)
            if outside:
                self.report(BOOLEAN_TEST, f"test reads {', '.join(outside)} not declared in its parallel arm", span)

    def _scoped(self, program: Program, types: Dict[str, tuple], arm: Optional[FrozenSet[str]]) -> None:
        span = program.span
        if isinstance(program, (Skip, Empty)):
            return
        if isinstance(program, Assign):
            if program.var not in types:
                self._unknown(program.var, span)
                return
            self._term(program.expr, types, types[program.var], span)
        elif isinstance(program, Block):
            inner = dict(types)
            for decl in program.decls:
                inner[decl.name] = type_tag(self.structure.sort(decl.sort))
            self._scoped(program.body, inner, arm)
        elif isinstance(program, Seq):
            self._scoped(program.first, types, arm)
            self._scoped(program.second, types, arm)
        elif isinstance(program, If):
            self._test(program.test, types, arm, span)
            self._scoped(program.then, types, arm)
            self._scoped(program.orelse, types, arm)
        elif isinstance(program, While):
            self._test(program.test, types, arm, span)
            self._scoped(program.body, types, arm)
        elif isinstance(program, Await):
            self._term(program.test, types, BOOL_TAG, span)
            self._scoped(program.body, types, arm)
        elif isinstance(program, Par):
            self._scoped(program.left, types, declared(program.left))
            self._scoped(program.right, types, declared(program.right))

    def _reads(self, term: Term, tracked: Set[str], assigned: Set[str], span) -> None:
        for name in sorted(free_vars(term) & tracked - assigned):
            self.report(INIT_BEFORE_READ, f"local {name} may be read before it is initialised", span)

    def _initialisation(self, program: Program, tracked: Set[str], assigned: Set[str]) -> Set[str]:
        """Forward must-assign pass over locals; returns the locals definitely assigned afterwards."""
        span = program.span
        if isinstance(program, Assign):
            self._reads(program.expr, tracked, assigned, span)
            return assigned | {program.var}
        if isinstance(program, Block):
            names = {d.name for d in program.decls}
            after = self._initialisation(program.body, tracked | names, assigned - names)
            return after - names
        if isinstance(program, Seq):
            middle = self._initialisation(program.first, tracked, assigned)
            return self._initialisation(program.second, tracked, middle)
        if isinstance(program, If):
            self._reads(program.test, tracked, assigned, span)
            return self._initialisation(program.then, tracked, assigned) & self._initialisation(
                program.orelse, tracked, assigned
            )
        if isinstance(program, While):
            self._reads(program.test, tracked, assigned, span)
            self._initialisation(program.body, tracked, assigned)
            return assigned
        if isinstance(program, Await):
            self._reads(program.test, tracked, assigned, span)
            return self._initialisation(program.body, tracked, assigned)
        if isinstance(program, Par):
            left = self._initialisation(program.left, tracked, assigned)
            right = self._initialisation(program.right, tracked, assigned)
            return left | right
        return assigned


def validate_program(program: Program, structure: Structure) -> List[Violation]:
    """All constraint violations of ``program``; an empty list means it is well formed.

    Unknown variables and sorts raise ValidationError instead.
    """
    violations = _Validator(program, structure).run()
    logger.debug("validated program: %d violations", len(violations))
    return violations


def await_test_notes(program: Program) -> List[str]:
    """Await tests reading variables hidden by a sibling parallel arm."""
    notes = []
    for statement in statements(program):
        if not isinstance(statement, Par):
            continue
        arms = (statement.left, statement.right)
        for arm, sibling in (arms, arms[::-1]):
            hidden = hid_set(sibling)
            for inner in statements(arm):
                if isinstance(inner, Await):
                    shared = sorted(free_vars(inner.test) & hidden)
                    if shared:
                        note = f"await test reads {', '.join(shared)} hidden by a sibling parallel arm"
                        if note not in notes:
                            notes.append(note)
    for note in notes:
        logger.warning(note)
    return notes
