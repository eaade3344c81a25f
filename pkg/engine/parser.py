"""Source files: grammar, tree transformer and the SourceFile they produce."""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from lark import Lark, Token, Transformer, Tree, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from .checker import Bracket, Specification, SpecifiedProgram
from .errors import RGCheckError, SourceSyntaxError, SpecificationError
from .proofs import ProofNode
from .removal import Removal
from .rules import RuleName
from .sorts import BOOL, Sort, enumeration, finite_set, natural, sequence
from .structure import Structure
from .syntax import (
    FALSE, TRUE, Apply, Assign, Await, Binder, Block, Closure, Compose, Decl, Frame, If, Lit, Par, Preserve, Program,
    Quant, Skip, Span, Term, Var, While, disj, seq,
)
from .logic import hook_expression

logger = logging.getLogger(__name__)

GRAMMAR = r"""
start: _section*

_section: sorts_section | vars_section | program_section | witness_section
        | spec_section | invariant_section | proof_section | obligation_section

sorts_section: "sorts" sort_def* "end"
sort_def: NAME "=" sort_expr ";"
?sort_expr: INT ".." INT                       -> range_sort
          | "enum" "(" NAME ("," NAME)* ")"    -> enum_sort
          | "seq" "(" sort_name "," INT ")"    -> seq_sort
          | "set" "(" sort_name ")"            -> set_sort
sort_name: NAME | "bool" -> bool_name

vars_section: "vars" var_decl* "end"
var_decl: NAME ("," NAME)* ":" sort_name ";"

program_section: "program" program "end"
witness_section: "witness" program "end"
spec_section: "spec" spec_body
invariant_section: "invariant" expr ";"
proof_section: "proof" proof_node "end"               -> proof_section
             | "proof" "lsp_b" proof_node "end"       -> restricted_proof_section
obligation_section: "obligation" "valid" expr ";"     -> valid_obligation
                  | "obligation" "wf" expr ";"        -> wf_obligation

spec_body: "(" name_set "," name_set ")" "::" "(" _assertions ")"   -> curly_spec
         | "[" name_set "," name_set "]" "::" "[" _assertions "]"   -> square_spec
_assertions: expr "," expr "," expr "," expr "," expr
name_set: "{" [NAME ("," NAME)*] "}"

// programs
program: statement (";" statement)* ";"?
?statement: "skip"                                          -> skip
          | NAME ":=" expr                                  -> assign
          | "begin" "loc" decl ("," decl)* ";" program "end" -> block
          | "if" expr "then" program "else" program "fi"    -> if_else
          | "if" expr "then" program "fi"                   -> if_then
          | "while" expr "do" program "od"                  -> loop
          | "await" expr "do" program "od"                  -> await_
          | "{" program ("||" program)+ "}"                 -> par
          | "(" program ")"
decl: NAME ":" sort_name

// expressions and assertions share one grammar
?expr: composition
     | ("forall" | "∀") binders ":" expr    -> forall
     | ("exists" | "∃") binders ":" expr    -> exists
binders: binder ("," binder)*
       | "{" binder ("," binder)* "}"
binder: NAME ["in" sort_name]               -> binder
      | HOOK NAME ["in" sort_name]          -> hooked_binder

?composition: equivalence
            | composition "|" equivalence   -> compose
?equivalence: implication
            | implication ("<=>" | "⇔") implication -> iff
?implication: disjunction
            | disjunction ("=>" | "⇒") implication  -> implies
?disjunction: conjunction
            | disjunction ("or" | "∨") conjunction   -> or_
?conjunction: negation
            | conjunction ("and" | "∧") negation     -> and_
?negation: comparison
         | ("not" | "¬") negation                   -> not_
?comparison: sum
           | sum "=" sum                 -> eq
           | sum ("!=" | "≠") sum        -> ne
           | sum "<" sum                 -> lt
           | sum ("<=" | "≤") sum        -> le
           | sum ">" sum                 -> gt
           | sum (">=" | "≥") sum        -> ge
           | sum ("in" | "∈") sum        -> member
?sum: product
    | sum "+" product                    -> add
    | sum "-" product                    -> sub
    | sum "++" product                   -> concat
    | sum "(+)" "[" INT "]" product      -> oplus
    | sum "(-)" "[" INT "]" product      -> ominus
    | sum "union" product                -> union
    | sum "without" product              -> without
?product: prefix
        | product "*" prefix             -> mul
        | product "div" prefix           -> div
        | product "mod" prefix           -> mod
        | product "inter" prefix         -> inter
?prefix: postfix
       | "#" prefix                      -> card
?postfix: atom
        | postfix "[" expr "]"           -> index
        | postfix "†"                    -> dagger
?atom: INT                               -> number
     | "true"                            -> true
     | "false"                           -> false
     | NAME                              -> name
     | HOOK NAME                         -> hooked_name
     | "(" expr ")"
     | "[" [expr ("," expr)*] "]"        -> seq_literal
     | "{" [expr ("," expr)*] "}"        -> set_literal
     | "len" "(" expr ")"                -> length
     | "max" "(" expr ")"                -> maximum
     | "min" "(" expr ")"                -> minimum
     | "closure" "(" expr ")"            -> closure
     | "rclosure" "(" expr ")"           -> rclosure
     | "preserve" "(" expr "," expr ")"  -> preserve
     | "hook" "(" expr ")"               -> hook
     | "I"                               -> frame
     | "I" "{" NAME ("," NAME)* "}"      -> frame

// proofs
proof_node: "by" RULE [params] ":" program "sat" spec_body [premises]
params: "[" param ("," param)* "]"
?param: "aux" NAME ":=" expr                    -> aux_param
      | "witness" "=" "<<" program ">>"         -> witness_param
premises: "{" (proof_node | removal)* "}"
removal: "removal" "<<" program ">>" "~>" "<<" program ">>" "with" "(" name_set "," name_set ")"

RULE: /[a-z]+(-[a-z]+)*/
HOOK: "'" | "↼"
NAME: /[A-Za-z_][A-Za-z0-9_]*/
COMMENT: /\/\/[^\n]*/

%import common.INT
%import common.WS
%ignore WS
%ignore COMMENT
"""

_parser = Lark(GRAMMAR, start=["start", "program", "expr"], parser="lalr", propagate_positions=True)


@dataclass(frozen=True)
class SourceFile:
    """One parsed source file: declarations plus at most one of each section."""

    structure: Structure
    declarations: Tuple[Tuple[str, str], ...] = ()
    program: Optional[Program] = None
    specification: Optional[Specification] = None
    bracket: Bracket = Bracket.CURLY
    witness: Optional[Program] = None
    invariant: Optional[Term] = None
    proof: Optional[ProofNode] = None
    lsp_b: bool = False
    obligations: Tuple[Tuple[str, Term], ...] = ()

    @property
    def specified(self) -> SpecifiedProgram:
        if self.program is None or self.specification is None:
            raise SpecificationError("the file needs both a program and a spec section")
        return SpecifiedProgram(self.program, self.specification, self.bracket)


def _span(meta) -> Optional[Span]:
    if getattr(meta, "empty", True):
        return None
    return Span(meta.line, meta.column, meta.end_line, meta.end_column)


def _present(children) -> list:
    return [c for c in children if c is not None]


def _binary(op: str):
    def build(self, meta, children):
        left, right = children
        return Apply(op, (left, right), span=_span(meta))

    return build


def _unary(op: str):
    def build(self, meta, children):
        (arg,) = children
        return Apply(op, (arg,), span=_span(meta))

    return build


@v_args(meta=True)
class SourceBuilder(Transformer):
    """Turns a parse tree into AST nodes; names of enum constants become literals."""

    def __init__(self, constants=frozenset(), variables=frozenset()):
        super().__init__()
        self.constants = frozenset(constants) - frozenset(variables)

    # ------------------------------------------------ declarations

    def range_sort(self, meta, children):
        low, high = children
        return ("natural", int(low), int(high))

    def enum_sort(self, meta, children):
        return ("enum", tuple(str(c) for c in children))

    def seq_sort(self, meta, children):
        element, length = children
        return ("sequence", element, int(length))

    def set_sort(self, meta, children):
        (element,) = children
        return ("set", element)

    def sort_name(self, meta, children):
        return str(children[0])

    def bool_name(self, meta, children):
        return "bool"

    def sort_def(self, meta, children):
        name, definition = children
        return (str(name), definition, meta.line)

    def sorts_section(self, meta, children):
        return ("sorts", children, meta.line)

    def var_decl(self, meta, children):
        *names, sort = children
        return [(str(n), sort) for n in names]

    def vars_section(self, meta, children):
        return ("vars", [pair for decl in children for pair in decl], meta.line)

    # ------------------------------------------------ sections

    def program_section(self, meta, children):
        return ("program", children[0], meta.line)

    def witness_section(self, meta, children):
        return ("witness", children[0], meta.line)

    def spec_section(self, meta, children):
        return ("spec", children[0], meta.line)

    def invariant_section(self, meta, children):
        return ("invariant", children[0], meta.line)

    def proof_section(self, meta, children):
        return ("proof", (children[0], False), meta.line)

    def restricted_proof_section(self, meta, children):
        return ("proof", (children[0], True), meta.line)

    def valid_obligation(self, meta, children):
        return ("obligation", ("valid", children[0]), meta.line)

    def wf_obligation(self, meta, children):
        return ("obligation", ("wf", children[0]), meta.line)

    def name_set(self, meta, children):
        return frozenset(str(c) for c in _present(children))

    def _spec(self, children, bracket):
        glo, aux, pre, rely, wait, guar, eff = children
        return Specification(glo, aux, pre, rely, wait, guar, eff), bracket

    def curly_spec(self, meta, children):
        return self._spec(children, Bracket.CURLY)

    def square_spec(self, meta, children):
        return self._spec(children, Bracket.SQUARE)

    # ------------------------------------------------ programs

    def program(self, meta, children):
        return seq(*children)

    def skip(self, meta, children):
        return Skip(span=_span(meta))

    def assign(self, meta, children):
        name, expr = children
        return Assign(str(name), expr, span=_span(meta))

    def decl(self, meta, children):
        name, sort = children
        return Decl(str(name), sort, span=_span(meta))

    def block(self, meta, children):
        *decls, body = children
        return Block(tuple(decls), body, span=_span(meta))

    def if_else(self, meta, children):
        test, then, orelse = children
        return If(test, then, orelse, span=_span(meta))

    def if_then(self, meta, children):
        test, then = children
        return If(test, then, Skip(span=_span(meta)), span=_span(meta))

    def loop(self, meta, children):
        test, body = children
        return While(test, body, span=_span(meta))

    def await_(self, meta, children):
        test, body = children
        return Await(test, body, span=_span(meta))

    def par(self, meta, children):
        result = children[-1]
        for arm in reversed(children[:-1]):
            result = Par(arm, result, span=_span(meta))
        return result

    # ------------------------------------------------ terms

    def number(self, meta, children):
        return Lit(int(children[0]), span=_span(meta))

    def true(self, meta, children):
        return TRUE

    def false(self, meta, children):
        return FALSE

    def name(self, meta, children):
        name = str(children[0])
        if name in self.constants:
            return Lit(name, span=_span(meta))
        return Var(name, span=_span(meta))

    def hooked_name(self, meta, children):
        return Var(str(children[1]), True, span=_span(meta))

    def binder(self, meta, children):
        name, sort = children
        return Binder(str(name), False, sort, span=_span(meta))

    def hooked_binder(self, meta, children):
        _, name, sort = children
        return Binder(str(name), True, sort, span=_span(meta))

    def binders(self, meta, children):
        return tuple(children)

    def forall(self, meta, children):
        binders, body = children
        return Quant("forall", binders, body, span=_span(meta))

    def exists(self, meta, children):
        binders, body = children
        return Quant("exists", binders, body, span=_span(meta))

    def compose(self, meta, children):
        left, right = children
        return Compose(left, right, span=_span(meta))

    def closure(self, meta, children):
        return Closure(children[0], span=_span(meta))

    dagger = closure

    def rclosure(self, meta, children):
        return Closure(disj(children[0], Frame()), span=_span(meta))

    def preserve(self, meta, children):
        base, step = children
        return Preserve(base, step, span=_span(meta))

    def hook(self, meta, children):
        return hook_expression(children[0])

    def frame(self, meta, children):
        return Frame(frozenset(str(c) for c in children), span=_span(meta))

    def seq_literal(self, meta, children):
        return Apply("seq", tuple(_present(children)), span=_span(meta))

    def set_literal(self, meta, children):
        return Apply("set", tuple(_present(children)), span=_span(meta))

    def oplus(self, meta, children):
        left, modulus, right = children
        return Apply("oplus", (left, right), int(modulus), span=_span(meta))

    def ominus(self, meta, children):
        left, modulus, right = children
        return Apply("ominus", (left, right), int(modulus), span=_span(meta))

    iff = _binary("<=>")
    implies = _binary("=>")
    or_ = _binary("or")
    and_ = _binary("and")
    not_ = _unary("not")
    eq = _binary("=")
    ne = _binary("!=")
    lt = _binary("<")
    le = _binary("<=")
    gt = _binary(">")
    ge = _binary(">=")
    member = _binary("in")
    add = _binary("+")
    sub = _binary("-")
    concat = _binary("concat")
    union = _binary("union")
    without = _binary("without")
    mul = _binary("*")
    div = _binary("div")
    mod = _binary("mod")
    inter = _binary("inter")
    index = _binary("index")
    card = _unary("card")
    length = _unary("len")
    maximum = _unary("max")
    minimum = _unary("min")

    # ------------------------------------------------ proofs

    def aux_param(self, meta, children):
        name, expr = children
        return ("aux", str(name), expr)

    def witness_param(self, meta, children):
        return ("witness", None, children[0])

    def params(self, meta, children):
        return children

    def premises(self, meta, children):
        return tuple(children)

    def removal(self, meta, children):
        augmented, plain, glo, aux = children
        return Removal(augmented, glo, aux, plain)

    def proof_node(self, meta, children):
        rule, params, program, (spec, bracket), premises = children
        try:
            rule = RuleName(str(rule))
        except ValueError:
            raise SourceSyntaxError(f"unknown rule {rule}", meta.line, meta.column) from None
        updates, witness = {}, None
        for kind, name, value in params or ():
            if kind == "aux":
                updates[name] = value
            else:
                witness = value
        return ProofNode(
            SpecifiedProgram(program, spec, bracket), rule, premises or (), {"aux": updates} if updates else {}, witness
        )


def _declared_names(tree: Tree) -> Tuple[set, set]:
    constants = set()
    for definition in tree.find_data("enum_sort"):
        constants.update(str(token) for token in definition.children)
    variables = set()
    for decl in tree.find_data("var_decl"):
        variables.update(str(t) for t in decl.children if isinstance(t, Token) and t.type == "NAME")
    return constants, variables


def _build_sort(name: str, definition, sorts: Dict[str, Sort], line: int) -> Sort:
    kind = definition[0]
    if kind == "natural":
        return natural(name, definition[1], definition[2])
    if kind == "enum":
        return enumeration(name, *definition[1])
    element_name = definition[1]
    if element_name not in sorts:
        raise SourceSyntaxError(f"sort {element_name} used before it is declared", line)
    if kind == "sequence":
        return sequence(name, sorts[element_name], definition[2])
    return finite_set(name, sorts[element_name])


def _assemble(sections: List[tuple]) -> SourceFile:
    sorts: Dict[str, Sort] = {"bool": BOOL}
    variables: Dict[str, Sort] = {}
    declarations: List[Tuple[str, str]] = []
    single: Dict[str, object] = {}
    obligations = []
    for kind, value, line in sections:
        if kind == "sorts":
            for name, definition, def_line in value:
                if name in sorts:
                    raise SourceSyntaxError(f"sort {name} declared twice", def_line)
                sorts[name] = _build_sort(name, definition, sorts, def_line)
        elif kind == "vars":
            for name, sort_name in value:
                if sort_name not in sorts:
                    raise SourceSyntaxError(f"variable {name} has undeclared sort {sort_name}", line)
                if name in variables:
                    raise SourceSyntaxError(f"variable {name} declared twice", line)
                variables[name] = sorts[sort_name]
                declarations.append((name, sort_name))
        elif kind == "obligation":
            obligations.append(value)
        else:
            if kind in single:
                raise SourceSyntaxError(f"more than one {kind} section", line)
            single[kind] = value
    spec, bracket = single.get("spec", (None, Bracket.CURLY))
    proof, lsp_b = single.get("proof", (None, False))
    return SourceFile(
        structure=Structure(sorts, variables),
        declarations=tuple(declarations),
        program=single.get("program"),
        specification=spec,
        bracket=bracket,
        witness=single.get("witness"),
        invariant=single.get("invariant"),
        proof=proof,
        lsp_b=lsp_b,
        obligations=tuple(obligations),
    )


def _syntax_error(exc: UnexpectedInput) -> SourceSyntaxError:
    line, column = getattr(exc, "line", 0), getattr(exc, "column", 0)
    if isinstance(exc, UnexpectedToken):
        return SourceSyntaxError(f"unexpected {exc.token!r}", line, column, list(exc.expected))
    if isinstance(exc, UnexpectedCharacters):
        return SourceSyntaxError(f"unexpected character {exc.char!r}", line, column, list(exc.allowed or ()))
    if isinstance(exc, UnexpectedEOF):
        return SourceSyntaxError("unexpected end of input", line if line > 0 else 0, column, list(exc.expected))
    return SourceSyntaxError(str(exc), line, column)


def _parse(text: str, start: str, constants=(), variables=()):
    try:
        tree = _parser.parse(text, start=start)
    except UnexpectedInput as exc:
        raise _syntax_error(exc) from None
    if start == "start":
        found, declared_vars = _declared_names(tree)
        constants = set(constants) | set(found)
        variables = set(variables) | declared_vars
    try:
        return SourceBuilder(constants, variables).transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, RGCheckError):
            raise exc.orig_exc from None
        raise


@lru_cache(maxsize=64)
def parse_source(text: str) -> SourceFile:
    """Parse a whole source file; raises SourceSyntaxError with a position."""
    tree = _parse(text, "start")
    source = _assemble(tree.children)
    logger.debug(
        "parsed source: %d variables, program=%s, proof=%s",
        len(source.declarations), source.program is not None, source.proof is not None,
    )
    return source


def parse_program(text: str, constants=()) -> Program:
    return _parse(text, "program", constants)


def parse_assertion(text: str, constants=()) -> Term:
    return _parse(text, "expr", constants)
