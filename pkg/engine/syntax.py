"""Abstract syntax for programs, expressions and assertions.

Expressions and assertions share one term tree. Program statements form a
second tree whose leaves hold terms. All nodes are frozen dataclasses with
structural equality that ignores source spans; hashes are cached because
configurations and extensions key dictionaries on whole programs.
"""
from dataclasses import dataclass, field, fields
from typing import Any, FrozenSet, Optional, Tuple


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_line: int = 0
    end_column: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


_KEY_FIELDS = {}


@dataclass(frozen=True, eq=False)
class Node:
    span: Optional[Span] = field(default=None, compare=False, repr=False, kw_only=True)

    def _key(self) -> tuple:
        names = _KEY_FIELDS.get(type(self))
        if names is None:
            names = tuple(f.name for f in fields(self) if f.compare)
            _KEY_FIELDS[type(self)] = names
        return (type(self).__name__,) + tuple(getattr(self, n) for n in names)

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self):
            return NotImplemented
        return hash(self) == hash(other) and self._key() == other._key()

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash(self._key())
            object.__setattr__(self, "_hash", cached)
        return cached


# ---------------------------------------------------------------- terms


class Term(Node):
    pass


@dataclass(frozen=True, eq=False)
class Var(Term):
    name: str
    hooked: bool = False


@dataclass(frozen=True, eq=False)
class Lit(Term):
    value: Any

    def _key(self) -> tuple:
        # keep True distinct from 1
        return ("Lit", type(self.value).__name__, self.value)


@dataclass(frozen=True, eq=False)
class Apply(Term):
    """Operator application; ``param`` is the modulus of the ⊕/⊖ operators."""

    op: str
    args: Tuple[Term, ...]
    param: Optional[int] = None


@dataclass(frozen=True, eq=False)
class Binder(Node):
    name: str
    hooked: bool = False
    sort: Optional[str] = None


@dataclass(frozen=True, eq=False)
class Quant(Term):
    kind: str  # "forall" | "exists"
    binders: Tuple[Binder, ...]
    body: Term


@dataclass(frozen=True, eq=False)
class Compose(Term):
    left: Term
    right: Term


@dataclass(frozen=True, eq=False)
class Closure(Term):
    """Least transitive relation containing ``body``."""

    body: Term


@dataclass(frozen=True, eq=False)
class Preserve(Term):
    """Least state set containing ``base`` and closed under ``step``."""

    base: Term
    step: Term


@dataclass(frozen=True, eq=False)
class Frame(Term):
    """Identity frame I over the enclosing scope minus ``changeable``."""

    changeable: FrozenSet[str] = frozenset()


@dataclass(frozen=True, eq=False)
class Hooked(Term):
    """A unary term evaluated in the old state."""

    body: Term


# Operators grouped by what they produce; the parser and printer share these.
ARITHMETIC = ("+", "-", "*", "div", "mod", "oplus", "ominus")
COMPARISON = ("=", "!=", "<", "<=", ">", ">=")
CONNECTIVES = ("not", "and", "or", "=>", "<=>")
SEQUENCE_OPS = ("len", "index", "seq", "concat")
SET_OPS = ("set", "union", "inter", "without", "in", "card", "max", "min")

TRUE = Lit(True)
FALSE = Lit(False)


def var(name: str) -> Var:
    return Var(name)


def old(name: str) -> Var:
    return Var(name, True)


def lit(value: Any) -> Lit:
    return Lit(value)


def apply(op: str, *args: Term, param: Optional[int] = None) -> Apply:
    return Apply(op, tuple(args), param)


def conjuncts(term: Term) -> Tuple[Term, ...]:
    """Flatten nested conjunctions, dropping literal ``true``."""
    if isinstance(term, Apply) and term.op == "and":
        return tuple(c for arg in term.args for c in conjuncts(arg))
    if term == TRUE:
        return ()
    return (term,)


def disjuncts(term: Term) -> Tuple[Term, ...]:
    if isinstance(term, Apply) and term.op == "or":
        return tuple(d for arg in term.args for d in disjuncts(arg))
    if term == FALSE:
        return ()
    return (term,)


def conj(*terms: Term) -> Term:
    parts = [c for t in terms for c in conjuncts(t)]
    if not parts:
        return TRUE
    if FALSE in parts:
        return FALSE
    result = parts[0]
    for part in parts[1:]:
        result = Apply("and", (result, part))
    return result


def disj(*terms: Term) -> Term:
    parts = [d for t in terms for d in disjuncts(t)]
    if not parts:
        return FALSE
    if TRUE in parts:
        return TRUE
    result = parts[0]
    for part in parts[1:]:
        result = Apply("or", (result, part))
    return result


def neg(term: Term) -> Term:
    if term == TRUE:
        return FALSE
    if term == FALSE:
        return TRUE
    return Apply("not", (term,))


def implies(left: Term, right: Term) -> Term:
    return Apply("=>", (left, right))


def iff(left: Term, right: Term) -> Term:
    return Apply("<=>", (left, right))


def equal(left: Term, right: Term) -> Term:
    return Apply("=", (left, right))


def unchanged(name: str) -> Term:
    return equal(Var(name), Var(name, True))


# ---------------------------------------------------------------- programs


class Program(Node):
    pass


@dataclass(frozen=True, eq=False)
class Empty(Program):
    """The empty program ε of terminated configurations."""


EPSILON = Empty()


@dataclass(frozen=True, eq=False)
class Skip(Program):
    pass


@dataclass(frozen=True, eq=False)
class Assign(Program):
    var: str
    expr: Term


@dataclass(frozen=True, eq=False)
class Decl(Node):
    name: str
    sort: str


@dataclass(frozen=True, eq=False)
class Block(Program):
    decls: Tuple[Decl, ...]
    body: Program


@dataclass(frozen=True, eq=False)
class Seq(Program):
    first: Program
    second: Program


@dataclass(frozen=True, eq=False)
class If(Program):
    test: Term
    then: Program
    orelse: Program


@dataclass(frozen=True, eq=False)
class While(Program):
    test: Term
    body: Program


@dataclass(frozen=True, eq=False)
class Par(Program):
    left: Program
    right: Program


@dataclass(frozen=True, eq=False)
class Await(Program):
    test: Term
    body: Program


def seq(*statements: Program) -> Program:
    """Right-nested sequential composition of one or more statements."""
    result = statements[-1]
    for statement in reversed(statements[:-1]):
        result = Seq(statement, result)
    return result


def par(*arms: Program) -> Program:
    result = arms[-1]
    for arm in reversed(arms[:-1]):
        result = Par(arm, result)
    return result


def flatten_seq(program: Program) -> Tuple[Program, ...]:
    if isinstance(program, Seq):
        return flatten_seq(program.first) + flatten_seq(program.second)
    return (program,)


def flatten_par(program: Program) -> Tuple[Program, ...]:
    if isinstance(program, Par):
        return flatten_par(program.left) + flatten_par(program.right)
    return (program,)
