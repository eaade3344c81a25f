"""Relation-valued operators on assertions and relation classification."""
import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Union

from .logic import (
    extension, free_vars, is_valid, solve, unary_extension,
)
from .relations import (
    StateRelation, StateSet, compose_maps, is_acyclic, is_transitive, reachable, transitive_closure,
)
from .structure import Structure
from .syntax import (
    Apply, Closure, Compose, Hooked, Lit, Preserve, Quant, Term, Var, conj, conjuncts, disj, equal,
)

logger = logging.getLogger(__name__)


def _names(scope: Optional[Iterable[str]], *terms: Term) -> FrozenSet[str]:
    if scope is not None:
        return frozenset(scope)
    return frozenset().union(*(free_vars(t) for t in terms))


def relation_of(assertion: Term, structure: Structure, scope: Optional[Iterable[str]] = None) -> StateRelation:
    names = _names(scope, assertion)
    succ = extension(assertion, names, structure)
    return StateRelation(names, frozenset((a, b) for a, bs in succ.items() for b in bs))


def states_of(assertion: Term, structure: Structure, scope: Optional[Iterable[str]] = None) -> StateSet:
    names = _names(scope, assertion)
    return StateSet(names, unary_extension(assertion, names, structure))


def rel_compose(first: Term, second: Term, structure: Structure, scope: Optional[Iterable[str]] = None) -> StateRelation:
    """{(s1, s3) | some s2 has (s1, s2) ⊨ first and (s2, s3) ⊨ second}."""
    names = _names(scope, first, second)
    pairs = compose_maps(extension(first, names, structure), extension(second, names, structure))
    return StateRelation(names, pairs)


def trans_closure(
    assertion: Term, reflexive: bool, structure: Structure, scope: Optional[Iterable[str]] = None
) -> StateRelation:
    names = _names(scope, assertion)
    pairs = set(transitive_closure(extension(assertion, names, structure)))
    if reflexive:
        pairs.update((s, s) for s in structure.states(names))
    return StateRelation(names, frozenset(pairs))


def preserve_under(
    base: Term, step: Term, structure: Structure, scope: Optional[Iterable[str]] = None
) -> StateSet:
    """Least state set containing ⟦base⟧ and closed under ``step`` successors."""
    names = _names(scope, base, step)
    states = reachable(unary_extension(base, names, structure), extension(step, names, structure))
    return StateSet(names, states)


@dataclass(frozen=True)
class RelationClass:
    reflexive: bool
    transitive: bool
    respects: bool


def components(assertion: Term) -> List[Term]:
    """Group the conjuncts of ``assertion`` into variable-disjoint conjunctions."""
    parts = list(conjuncts(assertion))
    groups: List[List[Term]] = []
    names: List[set] = []
    for part in parts:
        own = set(free_vars(part))
        merged = [i for i, g in enumerate(names) if g & own]
        group, group_names = [part], own
        for i in reversed(merged):
            group = groups.pop(i) + group
            group_names |= names.pop(i)
        groups.append(group)
        names.append(group_names)
    return [conj(*g) for g in groups]


def _unhook(term: Term) -> Optional[Term]:
    """The diagonal of a relation: free hooked variables read the new state; None for relation operators."""
    if any(isinstance(t, (Compose, Closure, Preserve, Hooked)) for t in _walk(term)):
        return None

    def walk(t: Term, bound: FrozenSet[str]) -> Term:
        if isinstance(t, Var):
            return Var(t.name, span=t.span) if t.hooked and t.name not in bound else t
        if isinstance(t, Quant):
            inner = bound | {b.name for b in t.binders if b.hooked}
            return Quant(t.kind, t.binders, walk(t.body, inner), span=t.span)
        if isinstance(t, Apply):
            return Apply(t.op, tuple(walk(a, bound) for a in t.args), t.param, span=t.span)
        return t

    return walk(term, frozenset())


def _walk(term: Term):
    yield term
    for child in getattr(term, "args", ()) or ():
        yield from _walk(child)
    for attr in ("body", "left", "right", "base", "step"):
        child = getattr(term, attr, None)
        if isinstance(child, Term):
            yield from _walk(child)


def is_reflexive(assertion: Term, structure: Structure) -> bool:
    for part in components(assertion):
        diagonal = _unhook(part)
        if diagonal is not None:
            if not is_valid(diagonal, structure):
                return False
            continue
        names = sorted(free_vars(part))
        succ = extension(part, names, structure)
        if any(s not in succ.get(s, ()) for s in structure.states(names)):
            return False
    return True


def is_transitive_relation(assertion: Term, structure: Structure) -> bool:
    parts = components(assertion)
    verdicts = []
    for part in parts:
        succ = extension(part, free_vars(part), structure)
        if not succ:
            return True
        verdicts.append(is_transitive(succ))
    return all(verdicts)


def respects(assertion: Term, variables: Iterable[str], structure: Structure) -> bool:
    """No pair of ``assertion`` changes any of ``variables``."""
    frame = conj(*(equal(Var(v), Var(v, True)) for v in sorted(variables)))
    names = free_vars(assertion) | frozenset(variables)
    for _ in solve([(assertion, True), (frame, False)], structure, free_old=names, free_new=names):
        return False
    return True


def classify_relation(assertion: Term, variables: Iterable[str], structure: Structure) -> RelationClass:
    result = RelationClass(
        reflexive=is_reflexive(assertion, structure),
        transitive=is_transitive_relation(assertion, structure),
        respects=respects(assertion, variables, structure),
    )
    logger.debug("classified relation: %s", result)
    return result


def well_founded(assertion: Term, structure: Structure, scope: Optional[Iterable[str]] = None) -> bool:
    """Over finite carriers a relation is well-founded iff its graph has no cycle."""
    names = _names(scope, assertion)
    succ = extension(assertion, names, structure)
    return is_acyclic(succ.keys(), succ)


def relation_to_assertion(relation: Union[StateRelation, StateSet]) -> Term:
    """A disjunctive normal form whose extension over the relation's variables is ``relation``."""
    if isinstance(relation, StateSet):
        return disj(*(
            conj(*(equal(Var(n), Lit(v)) for n, v in state.items()))
            for state in relation
        ))
    return disj(*(
        conj(
            *(equal(Var(n, True), Lit(v)) for n, v in old.items()),
            *(equal(Var(n), Lit(v)) for n, v in new.items()),
        )
        for old, new in relation
    ))
