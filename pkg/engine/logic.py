"""Evaluation of terms over finite structures and the enumeration search.

``evaluate`` interprets a term under an (old, new) state pair. ``solve``
enumerates the valuations of a set of free variable slots that satisfy a
list of goals; it checks each flattened literal as soon as its variables
are assigned, so failing prefixes are cut early. Every search in the engine
(validity, extensions, initial states, environment steps) goes through it.
"""
import logging
from collections import defaultdict
from functools import lru_cache
from itertools import product
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import EvaluationError, ValidationError
from .structure import State, Structure, freeze
from .syntax import (
    Apply, Assign, Await, Binder, Block, Closure, Compose, Decl, Empty, Frame, Hooked, If, Lit, Node,
    Par, Preserve, Program, Quant, Seq, Skip, Term, Var, While, conj, unchanged,
)

logger = logging.getLogger(__name__)

Key = Tuple[str, bool]
Goal = Tuple[Term, bool]


# ---------------------------------------------------------------- variables


@lru_cache(maxsize=None)
def dependencies(term: Term) -> FrozenSet[Key]:
    """Free (name, hooked) keys of a term; relation operators read both states."""
    if isinstance(term, Var):
        return frozenset({(term.name, term.hooked)})
    if isinstance(term, Lit) or isinstance(term, Frame):
        return frozenset()
    if isinstance(term, Apply):
        return frozenset().union(*(dependencies(a) for a in term.args))
    if isinstance(term, Quant):
        bound = {(b.name, b.hooked) for b in term.binders}
        return dependencies(term.body) - bound
    if isinstance(term, (Compose, Closure)):
        names = free_vars(term)
        return frozenset((n, h) for n in names for h in (True, False))
    if isinstance(term, Preserve):
        return frozenset((n, False) for n in free_vars(term))
    if isinstance(term, Hooked):
        return frozenset((n, True) for n, _ in dependencies(term.body))
    raise TypeError(f"not a term: {term!r}")


def _term_names(term: Term) -> FrozenSet[str]:
    if isinstance(term, (Compose, Closure, Preserve)):
        parts = (term.left, term.right) if isinstance(term, Compose) else (
            (term.body,) if isinstance(term, Closure) else (term.base, term.step)
        )
        return frozenset().union(*(_term_names(p) for p in parts))
    return frozenset(n for n, _ in dependencies(term))


@lru_cache(maxsize=None)
def free_vars(node: Node) -> FrozenSet[str]:
    """Unhooked names of all free variables of a term, or every variable of a program."""
    if isinstance(node, Term):
        return _term_names(node)
    if isinstance(node, (Skip, Empty)):
        return frozenset()
    if isinstance(node, Assign):
        return frozenset({node.var}) | free_vars(node.expr)
    if isinstance(node, Block):
        return frozenset(d.name for d in node.decls) | free_vars(node.body)
    if isinstance(node, Seq):
        return free_vars(node.first) | free_vars(node.second)
    if isinstance(node, Par):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, If):
        return free_vars(node.test) | free_vars(node.then) | free_vars(node.orelse)
    if isinstance(node, (While, Await)):
        return free_vars(node.test) | free_vars(node.body)
    raise TypeError(f"unexpected node {node!r}")


def has_hooks(term: Term) -> bool:
    return any(h for _, h in dependencies(term))


# ---------------------------------------------------------------- rewriting


def transform(term: Term, rewrite) -> Term:
    """Rebuild ``term`` bottom-up, replacing nodes for which ``rewrite`` returns a term."""
    if isinstance(term, Apply):
        args = tuple(transform(a, rewrite) for a in term.args)
        if args != term.args:
            term = Apply(term.op, args, term.param, span=term.span)
    elif isinstance(term, Quant):
        body = transform(term.body, rewrite)
        if body is not term.body:
            term = Quant(term.kind, term.binders, body, span=term.span)
    elif isinstance(term, Compose):
        term = Compose(transform(term.left, rewrite), transform(term.right, rewrite), span=term.span)
    elif isinstance(term, Closure):
        term = Closure(transform(term.body, rewrite), span=term.span)
    elif isinstance(term, Preserve):
        term = Preserve(transform(term.base, rewrite), transform(term.step, rewrite), span=term.span)
    elif isinstance(term, Hooked):
        term = Hooked(transform(term.body, rewrite), span=term.span)
    replaced = rewrite(term)
    return term if replaced is None else replaced


def hook_expression(term: Term) -> Term:
    """Replace every free unhooked variable by its hooked twin."""

    def walk(t: Term, bound: FrozenSet[str]) -> Term:
        if isinstance(t, Var):
            return Var(t.name, True, span=t.span) if not t.hooked and t.name not in bound else t
        if isinstance(t, (Lit, Hooked)):
            return t
        if isinstance(t, Apply):
            return Apply(t.op, tuple(walk(a, bound) for a in t.args), t.param, span=t.span)
        if isinstance(t, Quant):
            inner = bound | {b.name for b in t.binders if not b.hooked}
            return Quant(t.kind, t.binders, walk(t.body, inner), span=t.span)
        if isinstance(t, Preserve):
            return Hooked(t, span=t.span)
        raise ValidationError("only unary terms can be hooked")

    return walk(term, frozenset())


def identity_frame(changeable: Iterable[str], scope: Iterable[str]) -> Term:
    """Conjunction of v = ↼v over scope minus the changeable variables."""
    keep = sorted(set(scope) - set(changeable))
    return conj(*(unchanged(v) for v in keep))


def resolve_frames(term: Term, scope: Iterable[str]) -> Term:
    names = frozenset(scope)

    def rewrite(t: Term):
        if isinstance(t, Frame):
            return identity_frame(t.changeable, names)
        return None

    return transform(term, rewrite)


# ---------------------------------------------------------------- evaluation


def _fail(message: str, *values):
    raise EvaluationError(message, valuation={"operands": [repr(v) for v in values]})


def _div(a, b):
    if b == 0:
        _fail("division by zero", a, b)
    return a // b


def _mod(a, b):
    if b == 0:
        _fail("modulo by zero", a, b)
    return a % b


def _minus(a, b):
    if b > a:
        _fail(f"{a} - {b} is below zero", a, b)
    return a - b


def _index(s, i):
    if not 0 <= i < len(s):
        _fail(f"sequence index {i} out of range", s, i)
    return s[i]


def _extreme(pick, name):
    def run(values):
        if not values:
            _fail(f"{name} of an empty set", values)
        return pick(values)

    return run


_BINARY = {
    "+": lambda a, b: a + b,
    "-": _minus,
    "*": lambda a, b: a * b,
    "div": _div,
    "mod": _mod,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "index": _index,
    "concat": lambda a, b: a + b,
    "union": lambda a, b: a | b,
    "inter": lambda a, b: a & b,
    "without": lambda a, b: a - b,
    "in": lambda a, b: a in b,
}

_UNARY = {
    "len": len,
    "card": len,
    "max": _extreme(max, "max"),
    "min": _extreme(min, "min"),
}


def evaluate(
    term: Term,
    structure: Structure,
    old: Optional[Mapping[str, Any]],
    new: Optional[Mapping[str, Any]],
    bound: Optional[Dict[Key, Any]] = None,
) -> Any:
    """Value of ``term`` with hooked variables read from ``old`` and the rest from ``new``."""
    kind = type(term)
    if kind is Var:
        key = (term.name, term.hooked)
        if bound and key in bound:
            return bound[key]
        source = old if term.hooked else new
        if source is None:
            raise ValidationError(f"'{term.name} needs an old state")
        try:
            return source[term.name]
        except KeyError:
            raise ValidationError(f"unknown variable {term.name}") from None
    if kind is Lit:
        return term.value
    if kind is Apply:
        return _evaluate_apply(term, structure, old, new, bound)
    if kind is Quant:
        return _evaluate_quant(term, structure, old, new, bound)
    if kind is Hooked:
        if old is None:
            raise ValidationError("hooked term needs an old state")
        return evaluate(term.body, structure, None, old, _hook_bound(bound))
    if kind is Compose or kind is Closure:
        return _evaluate_relation(term, structure, old, new, bound)
    if kind is Preserve:
        names = sorted(free_vars(term))
        return freeze(new, names) in preserved_states(term, structure)
    if kind is Frame:
        raise ValidationError("identity frame I is only meaningful inside a specification")
    raise TypeError(f"not a term: {term!r}")


def _hook_bound(bound):
    if not bound:
        return bound
    inner = {k: v for k, v in bound.items() if not k[1]}
    inner.update({(n, False): v for (n, h), v in bound.items() if h})
    return inner


def _evaluate_apply(term: Apply, structure, old, new, bound) -> Any:
    op = term.op
    args = term.args
    if op == "and":
        return all(_truth(a, structure, old, new, bound) for a in args)
    if op == "or":
        return any(_truth(a, structure, old, new, bound) for a in args)
    if op == "not":
        return not _truth(args[0], structure, old, new, bound)
    if op == "=>":
        return (not _truth(args[0], structure, old, new, bound)) or _truth(args[1], structure, old, new, bound)
    if op == "<=>":
        return _truth(args[0], structure, old, new, bound) == _truth(args[1], structure, old, new, bound)
    values = [evaluate(a, structure, old, new, bound) for a in args]
    try:
        if op == "oplus":
            return (values[0] + values[1]) % term.param
        if op == "ominus":
            return (values[0] - values[1]) % term.param
        if op == "seq":
            return tuple(values)
        if op == "set":
            return frozenset(values)
        if op in _UNARY:
            return _UNARY[op](values[0])
        return _BINARY[op](values[0], values[1])
    except KeyError:
        raise ValidationError(f"unknown operator {op}") from None
    except TypeError as exc:
        raise EvaluationError(f"operator {op} applied to ill-sorted values: {exc}") from None


def _truth(term, structure, old, new, bound) -> bool:
    value = evaluate(term, structure, old, new, bound)
    if not isinstance(value, bool):
        raise EvaluationError(f"expected a truth value, got {value!r}")
    return value


def _binder_carrier(binder: Binder, structure: Structure):
    if binder.sort is not None:
        return structure.sort(binder.sort).carrier
    return structure.carrier(binder.name)


def _evaluate_quant(term: Quant, structure, old, new, bound) -> bool:
    keys = [(b.name, b.hooked) for b in term.binders]
    carriers = [_binder_carrier(b, structure) for b in term.binders]
    inner = dict(bound or {})
    want = term.kind == "forall"
    for values in product(*carriers):
        inner.update(zip(keys, values))
        if _truth(term.body, structure, old, new, inner) != want:
            return not want
    return want


def _evaluate_relation(term, structure, old, new, bound) -> bool:
    if old is None:
        raise ValidationError("relation operators need an old state")
    names = sorted(free_vars(term))
    if bound and dependencies(term) & bound.keys():
        return _evaluate_relation_directly(term, structure, old, new, bound, names)
    if isinstance(term, Compose):
        pairs = composed_pairs(term, structure)
    else:
        pairs = closure_pairs(term, structure)
    return (freeze(old, names), freeze(new, names)) in pairs


def _evaluate_relation_directly(term, structure, old, new, bound, names) -> bool:
    free = [n for n in names if (n, False) not in bound and (n, True) not in bound]
    if isinstance(term, Compose):
        for middle in structure.states(free):
            if _truth(term.left, structure, old, middle, bound) and _truth(term.right, structure, middle, new, bound):
                return True
        return False
    # closure: search paths through intermediate states
    start = freeze(old, free)
    goal = freeze(new, free)
    seen: Set[State] = set()
    frontier = [start]
    while frontier:
        current = frontier.pop()
        for nxt in structure.states(free):
            if nxt in seen or not _truth(term.body, structure, current, nxt, bound):
                continue
            if nxt == goal:
                return True
            seen.add(nxt)
            frontier.append(nxt)
    return False


def eval_assertion(
    assertion: Term,
    old: Optional[Mapping[str, Any]],
    new: Mapping[str, Any],
    structure: Structure,
) -> bool:
    """Truth of an assertion under the valuation induced by (old, new)."""
    return _truth(assertion, structure, old, new, None)


# ---------------------------------------------------------------- search


def _flatten(term: Term, polarity: bool, out: List[Goal]) -> None:
    if isinstance(term, Apply):
        if term.op == "and" and polarity or term.op == "or" and not polarity:
            for arg in term.args:
                _flatten(arg, polarity, out)
            return
        if term.op == "not":
            _flatten(term.args[0], not polarity, out)
            return
        if term.op == "=>" and not polarity:
            _flatten(term.args[0], True, out)
            _flatten(term.args[1], False, out)
            return
    if isinstance(term, Lit) and term.value is polarity:
        return
    out.append((term, polarity))


def _order_slots(slots: List[Key], literal_deps: List[FrozenSet[Key]], sizes: Dict[Key, int]) -> List[Key]:
    order: List[Key] = []
    assigned: Set[Key] = set()
    remaining = list(slots)
    while remaining:
        def score(slot):
            completes = sum(1 for d in literal_deps if slot in d and len(d - assigned) == 1)
            touches = sum(1 for d in literal_deps if slot in d and not d <= assigned)
            return (completes, touches, -sizes[slot])

        best = max(remaining, key=score)
        remaining.remove(best)
        order.append(best)
        assigned.add(best)
    return order


def solve(
    goals: Sequence[Goal],
    structure: Structure,
    old: Optional[Mapping[str, Any]] = None,
    new: Optional[Mapping[str, Any]] = None,
    free_old: Iterable[str] = (),
    free_new: Iterable[str] = (),
) -> Iterator[Tuple[Optional[State], State]]:
    """Enumerate (old, new) valuations of the free slots making every goal hold with its polarity.

    ``old`` and ``new`` fix the variables that are not searched over. Results
    come out in carrier order of the chosen slot order, so they are
    deterministic for a given input.
    """
    literals: List[Goal] = []
    for term, polarity in goals:
        _flatten(term, polarity, literals)
    slots = [(n, True) for n in sorted(set(free_old))] + [(n, False) for n in sorted(set(free_new))]
    slot_set = set(slots)
    literal_deps = [dependencies(t) & slot_set for t, _ in literals]
    sizes = {slot: len(structure.carrier(slot[0])) for slot in slots}
    order = _order_slots(slots, literal_deps, sizes)
    level = {slot: i + 1 for i, slot in enumerate(order)}
    schedule: List[List[int]] = [[] for _ in range(len(order) + 1)]
    guard: List[int] = []
    for k, deps in enumerate(literal_deps):
        at = max((level[d] for d in deps), default=0)
        schedule[at].append(k)
        # the literals before k must hold for k to be evaluated at all
        guard.append(max(at, guard[-1]) if guard else at)

    old_values: Optional[Dict[str, Any]] = dict(old) if old is not None else ({} if free_old else None)
    new_values: Dict[str, Any] = dict(new) if new is not None else {}
    carriers = [structure.carrier(name) for name, _ in order]
    pending: Dict[int, Dict[int, EvaluationError]] = {at: {} for at in range(len(order) + 1)}

    def holds(i: int, postponed: List[Tuple[int, int]]) -> bool:
        """Check the literals of level i; an evaluation error waits until its guard is decided."""
        waiting = pending[i]
        for k in sorted(set(waiting) | set(schedule[i])):
            if k in waiting:
                raise waiting[k]
            term, polarity = literals[k]
            try:
                if _truth(term, structure, old_values, new_values, None) is not polarity:
                    return False
            except EvaluationError as exc:
                if guard[k] <= i:
                    raise
                pending[guard[k]][k] = exc
                postponed.append((guard[k], k))
        return True

    def search(i: int):
        if i == len(order):
            yield (State(old_values) if old_values is not None else None, State(new_values))
            return
        name, hooked = order[i]
        target = old_values if hooked else new_values
        postponed: List[Tuple[int, int]] = []
        for value in carriers[i]:
            target[name] = value
            if holds(i + 1, postponed):
                yield from search(i + 1)
            for at, k in postponed:
                del pending[at][k]
            postponed.clear()
        del target[name]

    if holds(0, []):
        yield from search(0)


def counterexample(assertion: Term, structure: Structure) -> Optional[Tuple[Optional[State], State]]:
    """A valuation falsifying ``assertion``, or None when it is valid."""
    deps = dependencies(assertion)
    olds = [n for n, h in deps if h]
    news = [n for n, h in deps if not h]
    for pair in solve([(assertion, False)], structure, free_old=olds, free_new=news):
        return pair
    return None


def is_valid(assertion: Term, structure: Structure) -> bool:
    return counterexample(assertion, structure) is None


def satisfiable(assertion: Term, structure: Structure) -> bool:
    deps = dependencies(assertion)
    for _ in solve(
        [(assertion, True)], structure,
        free_old=[n for n, h in deps if h], free_new=[n for n, h in deps if not h],
    ):
        return True
    return False


# ---------------------------------------------------------------- extensions


def extension(term: Term, names: Iterable[str], structure: Structure) -> Dict[State, FrozenSet[State]]:
    """Successor map of a binary term over valuations of ``names``."""
    names = tuple(sorted(set(names)))
    key = ("extension", term, names)
    cached = structure.cache.get(key)
    if cached is None:
        successors: Dict[State, Set[State]] = defaultdict(set)
        for source, target in solve([(term, True)], structure, old={}, free_old=names, free_new=names):
            successors[source].add(target)
        cached = {s: frozenset(t) for s, t in successors.items()}
        structure.cache[key] = cached
        logger.debug("extension of %s over %s: %d sources", type(term).__name__, names, len(cached))
    return cached


def unary_extension(term: Term, names: Iterable[str], structure: Structure) -> FrozenSet[State]:
    names = tuple(sorted(set(names)))
    key = ("unary", term, names)
    cached = structure.cache.get(key)
    if cached is None:
        cached = frozenset(s for _, s in solve([(term, True)], structure, free_new=names))
        structure.cache[key] = cached
    return cached


def composed_pairs(term: Compose, structure: Structure) -> FrozenSet[Tuple[State, State]]:
    names = tuple(sorted(free_vars(term)))
    key = ("compose", term, names)
    cached = structure.cache.get(key)
    if cached is None:
        first = extension(term.left, names, structure)
        second = extension(term.right, names, structure)
        cached = frozenset(
            (source, target)
            for source, middles in first.items()
            for middle in middles
            for target in second.get(middle, ())
        )
        structure.cache[key] = cached
    return cached


def closure_pairs(term: Closure, structure: Structure) -> FrozenSet[Tuple[State, State]]:
    from .relations import transitive_closure

    names = tuple(sorted(free_vars(term)))
    key = ("closure", term, names)
    cached = structure.cache.get(key)
    if cached is None:
        cached = transitive_closure(extension(term.body, names, structure))
        structure.cache[key] = cached
    return cached


def preserved_states(term: Preserve, structure: Structure) -> FrozenSet[State]:
    from .relations import reachable

    names = tuple(sorted(free_vars(term)))
    key = ("preserve", term, names)
    cached = structure.cache.get(key)
    if cached is None:
        cached = reachable(unary_extension(term.base, names, structure), extension(term.step, names, structure))
        structure.cache[key] = cached
    return cached
