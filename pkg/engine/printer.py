"""Rendering of AST nodes back into source syntax.

``show`` produces single-line text that the parser reads back to an equal
node; ``pretty`` lays programs out over several lines for reports.
"""
from typing import Iterable, List, Tuple

from .structure import Structure, render_value
from .syntax import (
    Apply, Assign, Await, Binder, Block, Closure, Compose, Empty, Frame, Hooked, If, Lit, Node, Par, Preserve,
    Program, Quant, Seq, Skip, Term, Var, While, flatten_seq,
)

# (precedence, associativity); higher binds tighter.
_INFIX = {
    "<=>": (1, "none", "<=>"),
    "=>": (2, "right", "=>"),
    "or": (3, "left", "or"),
    "and": (4, "left", "and"),
    "=": (6, "none", "="),
    "!=": (6, "none", "!="),
    "<": (6, "none", "<"),
    "<=": (6, "none", "<="),
    ">": (6, "none", ">"),
    ">=": (6, "none", ">="),
    "in": (6, "none", "in"),
    "+": (7, "left", "+"),
    "-": (7, "left", "-"),
    "concat": (7, "left", "++"),
    "union": (7, "left", "union"),
    "without": (7, "left", "without"),
    "*": (8, "left", "*"),
    "div": (8, "left", "div"),
    "mod": (8, "left", "mod"),
    "inter": (8, "left", "inter"),
}
_FUNCTIONS = {"len": "len", "max": "max", "min": "min"}
_QUANT, _COMPOSE, _NOT, _SUM, _CARD, _POSTFIX, _ATOM = -1, 0, 5, 7, 9, 10, 11


def _wrap(text: str, level: int, context: int) -> str:
    return f"({text})" if level < context else text


def _names(names: Iterable[str]) -> str:
    return "{" + ", ".join(sorted(names)) + "}"


def _literal(value) -> str:
    if isinstance(value, tuple):
        return "[" + ", ".join(_literal(v) for v in value) + "]"
    if isinstance(value, frozenset):
        return "{" + ", ".join(_literal(v) for v in sorted(value, key=repr)) + "}"
    return render_value(value)


def _binder(binder: Binder) -> str:
    text = ("'" if binder.hooked else "") + binder.name
    return f"{text} in {binder.sort}" if binder.sort else text


def _term(term: Term, context: int) -> str:
    if isinstance(term, Var):
        return ("'" if term.hooked else "") + term.name
    if isinstance(term, Lit):
        return _literal(term.value)
    if isinstance(term, Quant):
        binders = ", ".join(_binder(b) for b in term.binders)
        return _wrap(f"{term.kind} {binders}: {_term(term.body, _QUANT)}", _QUANT, context)
    if isinstance(term, Compose):
        text = f"{_term(term.left, _COMPOSE)} | {_term(term.right, _COMPOSE + 1)}"
        return _wrap(text, _COMPOSE, context)
    if isinstance(term, Closure):
        return f"closure({_term(term.body, _QUANT)})"
    if isinstance(term, Preserve):
        return f"preserve({_term(term.base, _QUANT)}, {_term(term.step, _QUANT)})"
    if isinstance(term, Hooked):
        return f"hook({_term(term.body, _QUANT)})"
    if isinstance(term, Frame):
        return "I" + (_names(term.changeable) if term.changeable else "")
    if isinstance(term, Apply):
        return _apply(term, context)
    raise TypeError(f"cannot render {term!r}")


def _apply(term: Apply, context: int) -> str:
    op, args = term.op, term.args
    if op in _INFIX:
        level, assoc, symbol = _INFIX[op]
        left_ctx = level if assoc == "left" else level + 1
        right_ctx = level if assoc == "right" else level + 1
        parts = [_term(args[0], left_ctx)] + [_term(a, right_ctx) for a in args[1:]]
        return _wrap(f" {symbol} ".join(parts), level, context)
    if op in ("oplus", "ominus"):
        symbol = "(+)" if op == "oplus" else "(-)"
        text = f"{_term(args[0], _SUM)} {symbol}[{term.param}] {_term(args[1], _SUM + 1)}"
        return _wrap(text, _SUM, context)
    if op == "not":
        return _wrap(f"not {_term(args[0], _NOT)}", _NOT, context)
    if op == "card":
        return _wrap(f"#{_term(args[0], _CARD)}", _CARD, context)
    if op == "index":
        return _wrap(f"{_term(args[0], _POSTFIX)}[{_term(args[1], _QUANT)}]", _POSTFIX, context)
    if op in _FUNCTIONS:
        return f"{_FUNCTIONS[op]}({_term(args[0], _QUANT)})"
    if op == "seq":
        return "[" + ", ".join(_term(a, _QUANT) for a in args) + "]"
    if op == "set":
        return "{" + ", ".join(_term(a, _QUANT) for a in args) + "}"
    raise TypeError(f"cannot render operator {op}")


def _par_arms(program: Par) -> List[Program]:
    arms = [program.left]
    rest = program.right
    while isinstance(rest, Par):
        arms.append(rest.left)
        rest = rest.right
    arms.append(rest)
    return arms


def _program(program: Program) -> str:
    if isinstance(program, Empty):
        return "ε"
    if isinstance(program, Skip):
        return "skip"
    if isinstance(program, Assign):
        return f"{program.var} := {_term(program.expr, _QUANT)}"
    if isinstance(program, Seq):
        first = _program(program.first)
        if isinstance(program.first, Seq):
            first = f"({first})"
        return f"{first}; {_program(program.second)}"
    if isinstance(program, Block):
        decls = ", ".join(f"{d.name} : {d.sort}" for d in program.decls)
        return f"begin loc {decls}; {_program(program.body)} end"
    if isinstance(program, If):
        return f"if {_term(program.test, _QUANT)} then {_program(program.then)} else {_program(program.orelse)} fi"
    if isinstance(program, While):
        return f"while {_term(program.test, _QUANT)} do {_program(program.body)} od"
    if isinstance(program, Await):
        return f"await {_term(program.test, _QUANT)} do {_program(program.body)} od"
    if isinstance(program, Par):
        return "{ " + " || ".join(_program(arm) for arm in _par_arms(program)) + " }"
    raise TypeError(f"cannot render {program!r}")


def show(node) -> str:
    """Single-line source text for a term, program, specification or specified program."""
    from .checker import SpecifiedProgram, Specification
    from .removal import Removal

    if isinstance(node, Term):
        return _term(node, _QUANT)
    if isinstance(node, Program):
        return _program(node)
    if isinstance(node, Specification):
        return show_spec(node)
    if isinstance(node, SpecifiedProgram):
        return f"{_program(node.program)} sat {show_spec(node.spec, node.square)}"
    if isinstance(node, Removal):
        return (
            f"removal << {_program(node.augmented)} >> ~> << {_program(node.plain)} >> "
            f"with ({_names(node.glo)}, {_names(node.aux)})"
        )
    if isinstance(node, Node):
        return repr(node)
    return str(node)


def show_spec(spec, square: bool = False) -> str:
    left, right = ("[", "]") if square else ("(", ")")
    assertions = ", ".join(_term(a, _QUANT) for a in spec.assertions().values())
    return f"{left}{_names(spec.glo)}, {_names(spec.aux)}{right} :: {left}{assertions}{right}"


def pretty(program: Program, indent: int = 0) -> str:
    """Multi-line layout of a program, two spaces per nesting level."""
    pad = "  " * indent
    if isinstance(program, Seq):
        parts = flatten_seq(program)
        return ";\n".join(pretty(p, indent) for p in parts)
    if isinstance(program, Block):
        decls = ", ".join(f"{d.name} : {d.sort}" for d in program.decls)
        return f"{pad}begin loc {decls};\n{pretty(program.body, indent + 1)}\n{pad}end"
    if isinstance(program, If):
        return (
            f"{pad}if {show(program.test)} then\n{pretty(program.then, indent + 1)}\n"
            f"{pad}else\n{pretty(program.orelse, indent + 1)}\n{pad}fi"
        )
    if isinstance(program, (While, Await)):
        keyword = "while" if isinstance(program, While) else "await"
        return f"{pad}{keyword} {show(program.test)} do\n{pretty(program.body, indent + 1)}\n{pad}od"
    if isinstance(program, Par):
        arms = [pretty(arm, indent + 1) for arm in _par_arms(program)]
        return f"{pad}{{\n" + f"\n{pad}||\n".join(arms) + f"\n{pad}}}"
    return pad + _program(program)


def show_declarations(structure: Structure, declarations: Iterable[Tuple[str, str]]) -> str:
    """``sorts`` and ``vars`` sections declaring everything in ``structure``."""
    sorts = [s for name, s in structure.sorts.items() if name != "bool"]
    lines = []
    if sorts:
        lines.append("sorts")
        lines.extend(f"  {s.name} = {s.describe()};" for s in sorts)
        lines.append("end")
    lines.append("vars")
    lines.extend(f"  {name} : {sort};" for name, sort in declarations)
    lines.append("end")
    return "\n".join(lines)
