"""The auxiliary-variable removal relation and its erasure function."""
import logging
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Tuple

from .errors import StructureError
from .analysis import globals_of, statements
from .logic import free_vars
from .printer import show
from .syntax import (
    TRUE, Assign, Await, Block, Empty, If, Par, Program, Seq, Skip, While, flatten_seq, seq,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Removal:
    """``augmented`` is ``plain`` with auxiliary structure over ``aux`` added."""

    augmented: Program
    glo: FrozenSet[str]
    aux: FrozenSet[str]
    plain: Program


def _aux_updates(updates: Tuple[Program, ...], glo: FrozenSet[str], aux: FrozenSet[str]) -> bool:
    """Distinct auxiliary assignments whose right-hand sides read only ϑ and their own target."""
    targets = []
    for update in updates:
        if not isinstance(update, Assign) or update.var not in aux:
            return False
        if not free_vars(update.expr) <= glo | {update.var}:
            return False
        targets.append(update.var)
    return len(targets) == len(set(targets))


def _trailing_aux(body: Tuple[Program, ...], aux: FrozenSet[str]) -> int:
    count = 0
    for statement in reversed(body):
        if isinstance(statement, Assign) and statement.var in aux:
            count += 1
        else:
            break
    return count


def _relates(augmented: Program, plain: Program, glo: FrozenSet[str], aux: FrozenSet[str]) -> bool:
    if isinstance(plain, Seq) or isinstance(augmented, Seq):
        left, right = flatten_seq(augmented), flatten_seq(plain)
        return len(left) == len(right) and all(_relates(a, p, glo, aux) for a, p in zip(left, right))
    if isinstance(plain, Assign):
        if augmented == plain:
            return True
        if not isinstance(augmented, Await) or augmented.test != TRUE:
            return False
        body = flatten_seq(augmented.body)
        return len(body) >= 2 and body[-1] == plain and _aux_updates(body[:-1], glo, aux)
    if isinstance(plain, Await):
        if not isinstance(augmented, Await) or augmented.test != plain.test:
            return False
        body = flatten_seq(augmented.body)
        count = _trailing_aux(body, aux)
        if count == len(body) or not _aux_updates(body[len(body) - count:], glo, aux):
            return False
        return _relates(seq(*body[: len(body) - count]), plain.body, glo, aux)
    if isinstance(plain, (Skip, Empty)):
        return augmented == plain
    if isinstance(plain, Block):
        return (
            isinstance(augmented, Block)
            and augmented.decls == plain.decls
            and _relates(augmented.body, plain.body, glo, aux)
        )
    if isinstance(plain, If):
        return (
            isinstance(augmented, If)
            and augmented.test == plain.test
            and _relates(augmented.then, plain.then, glo, aux)
            and _relates(augmented.orelse, plain.orelse, glo, aux)
        )
    if isinstance(plain, While):
        return (
            isinstance(augmented, While)
            and augmented.test == plain.test
            and _relates(augmented.body, plain.body, glo, aux)
        )
    if isinstance(plain, Par):
        return (
            isinstance(augmented, Par)
            and _relates(augmented.left, plain.left, glo, aux)
            and _relates(augmented.right, plain.right, glo, aux)
        )
    return False


def check_removal(removal: Removal) -> bool:
    """True iff ``augmented`` arises from ``plain`` by the two auxiliary substitution schemes."""
    glo, aux, plain = removal.glo, removal.aux, removal.plain
    if glo & aux:
        return False
    plain_vars = free_vars(plain)
    if plain_vars & aux:
        return False
    if plain_vars & glo != globals_of(plain):
        return False
    return _relates(removal.augmented, plain, glo, aux)


def _erase(program: Program, aux: FrozenSet[str]) -> Program:
    if isinstance(program, Seq):
        return Seq(_erase(program.first, aux), _erase(program.second, aux), span=program.span)
    if isinstance(program, Assign):
        if program.var in aux:
            raise StructureError(f"auxiliary assignment to {program.var} outside an await wrapper at {program.span}")
        return program
    if isinstance(program, Await):
        body = flatten_seq(program.body)
        last = body[-1]
        if (
            program.test == TRUE
            and len(body) >= 2
            and isinstance(last, Assign)
            and last.var not in aux
            and _trailing_aux(body[:-1], aux) == len(body) - 1
        ):
            return Assign(last.var, last.expr, span=program.span)
        count = _trailing_aux(body, aux)
        if count == len(body):
            raise StructureError(f"await at {program.span} holds only auxiliary assignments")
        rest = seq(*body[: len(body) - count])
        return Await(program.test, _erase(rest, aux), span=program.span)
    if isinstance(program, Block):
        return Block(program.decls, _erase(program.body, aux), span=program.span)
    if isinstance(program, If):
        return If(program.test, _erase(program.then, aux), _erase(program.orelse, aux), span=program.span)
    if isinstance(program, While):
        return While(program.test, _erase(program.body, aux), span=program.span)
    if isinstance(program, Par):
        return Par(_erase(program.left, aux), _erase(program.right, aux), span=program.span)
    return program


def erase_auxiliary(augmented: Program, aux: FrozenSet[str]) -> Program:
    """The unique plain program related to ``augmented`` by removal of ``aux``."""
    aux = frozenset(aux)
    plain = _erase(augmented, aux)
    glo = globals_of(plain)
    if not check_removal(Removal(augmented, glo, aux, plain)):
        offending = _first_bad_update(augmented, glo, aux)
        raise StructureError(
            "program is not an augmentation"
            + (f": {offending}" if offending else "")
        )
    logger.debug("erased %d auxiliary variables", len(aux))
    return plain


def _first_bad_update(program: Program, glo: FrozenSet[str], aux: FrozenSet[str]) -> Optional[str]:
    for statement in statements(program):
        if isinstance(statement, Assign) and statement.var in aux:
            if not free_vars(statement.expr) <= glo | {statement.var}:
                return f"auxiliary update {show(statement)} reads other variables"
    for statement in statements(program):
        if isinstance(statement, Assign) and free_vars(statement.expr) & aux and statement.var not in aux:
            return f"{show(statement)} reads an auxiliary variable"
    return None
