"""Explicit relations over states and the graph algorithms on them."""
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Set, Tuple

from .structure import State

Pair = Tuple[State, State]


@dataclass(frozen=True)
class StateRelation:
    """A binary relation given by its pairs, restricted to ``variables``."""

    variables: FrozenSet[str]
    pairs: FrozenSet[Pair]

    def __contains__(self, pair: Pair) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs, key=lambda p: (repr(p[0]), repr(p[1]))))

    def successors(self) -> Dict[State, FrozenSet[State]]:
        return successor_map(self.pairs)

    def issubset(self, other: "StateRelation") -> bool:
        return self.pairs <= other.pairs

    def to_list(self) -> List[dict]:
        return [{"old": a.to_dict(), "new": b.to_dict()} for a, b in self]


@dataclass(frozen=True)
class StateSet:
    """A unary relation: a set of states over ``variables``."""

    variables: FrozenSet[str]
    states: FrozenSet[State]

    def __contains__(self, state: State) -> bool:
        return state in self.states

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(sorted(self.states, key=repr))

    def issubset(self, other: "StateSet") -> bool:
        return self.states <= other.states

    def to_list(self) -> List[dict]:
        return [s.to_dict() for s in self]


def successor_map(pairs: Iterable[Pair]) -> Dict[State, FrozenSet[State]]:
    succ: Dict[State, Set[State]] = defaultdict(set)
    for a, b in pairs:
        succ[a].add(b)
    return {a: frozenset(bs) for a, bs in succ.items()}


def transitive_closure(successors: Mapping[Hashable, Iterable[Hashable]]) -> FrozenSet[tuple]:
    """Least transitive relation containing the given successor map."""
    closure = set()
    for source in successors:
        seen = set()
        queue = deque(successors[source])
        while queue:
            node = queue.popleft()
            if node in seen:
                continue
            seen.add(node)
            queue.extend(successors.get(node, ()))
        closure.update((source, target) for target in seen)
    return frozenset(closure)


def reachable(starts: Iterable[Hashable], successors: Mapping[Hashable, Iterable[Hashable]]) -> FrozenSet:
    seen = set(starts)
    queue = deque(seen)
    while queue:
        node = queue.popleft()
        for nxt in successors.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


def compose_maps(first: Mapping, second: Mapping) -> FrozenSet[tuple]:
    return frozenset((a, c) for a, bs in first.items() for b in bs for c in second.get(b, ()))


def is_transitive(successors: Mapping[Hashable, FrozenSet]) -> bool:
    # successor sets are interned so repeated (b, a) checks hit the memo
    interned: Dict[FrozenSet, FrozenSet] = {}
    succ = {a: interned.setdefault(frozenset(bs), frozenset(bs)) for a, bs in successors.items()}
    empty = frozenset()
    checked: Set[Tuple[int, int]] = set()
    for a, bs in succ.items():
        for b in bs:
            nxt = succ.get(b, empty)
            key = (id(nxt), id(bs))
            if key in checked:
                continue
            if not nxt <= bs:
                return False
            checked.add(key)
    return True


def is_acyclic(nodes: Iterable[Hashable], successors: Mapping[Hashable, Iterable[Hashable]]) -> bool:
    """Kahn's algorithm; a self-loop counts as a cycle."""
    indegree: Dict[Hashable, int] = {n: 0 for n in nodes}
    for node, targets in successors.items():
        indegree.setdefault(node, 0)
        for target in targets:
            indegree[target] = indegree.get(target, 0) + 1
    queue = deque(n for n, d in indegree.items() if d == 0)
    removed = 0
    while queue:
        node = queue.popleft()
        removed += 1
        for target in successors.get(node, ()):
            indegree[target] -= 1
            if indegree[target] == 0:
                queue.append(target)
    return removed == len(indegree)


def strongly_connected_components(
    nodes: Iterable[Hashable], successors: Mapping[Hashable, Iterable[Hashable]]
) -> List[List[Hashable]]:
    """Tarjan's algorithm, iterative so deep graphs do not hit the recursion limit."""
    index: Dict[Hashable, int] = {}
    low: Dict[Hashable, int] = {}
    on_stack: Set[Hashable] = set()
    stack: List[Hashable] = []
    components: List[List[Hashable]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(successors.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, children = work[-1]
            advanced = False
            for child in children:
                if child not in index:
                    index[child] = low[child] = counter
                    counter += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(successors.get(child, ()))))
                    advanced = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                components.append(component)
    return components
