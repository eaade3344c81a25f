"""Reachable configuration graphs and their DOT rendering."""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .analysis import hid_set, local_sorts
from .errors import BudgetExceeded, CarrierOverflow, EvaluationError
from .logic import solve
from .printer import show
from .relations import strongly_connected_components
from .semantics import EXTERNAL, INTERNAL, Configuration, Edge, Environment, Interpreter
from .structure import State, Structure
from .syntax import Program, Term

logger = logging.getLogger(__name__)

RAISE = "raise"
TRUNCATE = "truncate"
# carrier overflow becomes a boundary, every other evaluation error is raised
CLIP = "clip"


@dataclass
class ConfigGraph:
    """Configurations reachable from ``root`` under internal and environment steps.

    ``nodes`` is in breadth-first order and ``parent`` records the edge that
    first reached each node, so ``path_to`` gives a shortest trace.
    """

    root: Configuration
    nodes: List[Configuration] = field(default_factory=list)
    edges: List[Edge] = field(default_factory=list)
    outgoing: Dict[Configuration, List[Edge]] = field(default_factory=dict)
    parent: Dict[Configuration, Edge] = field(default_factory=dict)
    blocked: Set[Configuration] = field(default_factory=set)
    truncated: Set[Configuration] = field(default_factory=set)

    def internal_edges(self) -> Iterable[Edge]:
        return (e for e in self.edges if e.label == INTERNAL)

    def terminal(self) -> List[Configuration]:
        return [n for n in self.nodes if n.terminated]

    def path_to(self, node: Configuration) -> List[Edge]:
        path = []
        while node != self.root:
            edge = self.parent[node]
            path.append(edge)
            node = edge.source
        path.reverse()
        return path

    def divergent_cycle(self) -> Optional[List[Edge]]:
        """A reachable cycle containing an internal edge, as a path from the root around the cycle."""
        successors = {n: [e.target for e in self.outgoing.get(n, ())] for n in self.nodes}
        for component in strongly_connected_components(self.nodes, successors):
            members = set(component)
            inner = [
                e for n in component for e in self.outgoing.get(n, ())
                if e.target in members and e.label == INTERNAL
            ]
            if not inner:
                continue
            start = inner[0]
            return self.path_to(start.source) + [start] + self._route(start.target, start.source, members)
        return None

    def _route(self, source: Configuration, goal: Configuration, members: Set[Configuration]) -> List[Edge]:
        if source == goal:
            return []
        back: Dict[Configuration, Edge] = {}
        queue = deque([source])
        seen = {source}
        while queue:
            node = queue.popleft()
            for edge in self.outgoing.get(node, ()):
                target = edge.target
                if target not in members or target in seen:
                    continue
                seen.add(target)
                back[target] = edge
                if target == goal:
                    route = []
                    while target != source:
                        step = back[target]
                        route.append(step)
                        target = step.source
                    return route[::-1]
                queue.append(target)
        return []


@dataclass
class Budget:
    limit: int
    used: int = 0
    statistics: Dict[str, int] = field(default_factory=dict)

    def take(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise BudgetExceeded(self.limit, {**self.statistics, "configurations": self.used - 1})


def initial_states(
    pre: Term, scope: Iterable[str], program: Program, structure: Structure
) -> List[State]:
    """States over the scope satisfying ``pre``; locals start at their first carrier element."""
    locals_ = {name: sort.first for name, sort in local_sorts(program, structure).items()}
    return [state.update(locals_) for _, state in solve([(pre, True)], structure, free_new=sorted(scope))]


class GraphBuilder:
    """Builds one ConfigGraph per initial state, sharing transition caches."""

    def __init__(
        self,
        program: Program,
        pre: Term,
        rely: Term,
        scope: Iterable[str],
        structure: Structure,
        budget: int,
        on_error: str = RAISE,
    ):
        self.program = program
        self.pre = pre
        self.scope = frozenset(scope)
        self.structure = structure.with_locals(local_sorts(program, structure))
        self.interpreter = Interpreter(self.structure, limit=budget)
        self.environment = Environment(rely, hid_set(program), self.scope, self.structure)
        self.budget = Budget(budget)
        self.on_error = on_error
        self.statistics = self.budget.statistics
        self.statistics.update(graphs=0, nodes=0, edges=0, truncated=0)

    def initial_states(self) -> List[State]:
        return initial_states(self.pre, self.scope, self.program, self.structure)

    def graphs(self):
        states = self.initial_states()
        self.statistics["initial_states"] = len(states)
        for state in states:
            yield self.build(Configuration(self.program, state))

    def build(self, root: Configuration) -> ConfigGraph:
        graph = ConfigGraph(root)
        seen = {root}
        queue = deque([root])
        self.budget.take()
        while queue:
            node = queue.popleft()
            graph.nodes.append(node)
            out: List[Edge] = []
            try:
                internal = self.interpreter.step(node.program, node.state)
            except EvaluationError as exc:
                if self.on_error == RAISE or (self.on_error == CLIP and not isinstance(exc, CarrierOverflow)):
                    exc.configuration = node
                    exc.args = (f"{exc.args[0]} in configuration {node!r}",)
                    raise
                graph.truncated.add(node)
                internal = ()
            for program, state in internal:
                out.append(Edge(node, INTERNAL, Configuration(program, state)))
            if not internal and not node.terminated and node not in graph.truncated:
                graph.blocked.add(node)
            for state in self.environment.steps(node.state):
                out.append(Edge(node, EXTERNAL, Configuration(node.program, state)))
            graph.outgoing[node] = out
            for edge in out:
                graph.edges.append(edge)
                if edge.target not in seen:
                    self.budget.take()
                    seen.add(edge.target)
                    graph.parent[edge.target] = edge
                    queue.append(edge.target)
        self.statistics["graphs"] += 1
        self.statistics["nodes"] += len(graph.nodes)
        self.statistics["edges"] += len(graph.edges)
        self.statistics["truncated"] += len(graph.truncated)
        logger.debug("graph from %r: %d nodes, %d edges", root.state, len(graph.nodes), len(graph.edges))
        return graph


def build_config_graph(
    program: Program,
    pre: Term,
    rely: Term,
    scope: Iterable[str],
    structure: Structure,
    budget: int = 10 ** 6,
    on_error: str = RAISE,
) -> List[ConfigGraph]:
    """One reachable graph per initial state satisfying ``pre``."""
    builder = GraphBuilder(program, pre, rely, scope, structure, budget, on_error)
    graphs = list(builder.graphs())
    logger.info("built %d graphs with %d nodes", len(graphs), builder.statistics["nodes"])
    return graphs


def to_dot(graphs: List[ConfigGraph]) -> str:
    """Graphviz text: nodes are program residue hashes plus states, edges labelled i or e."""
    ids: Dict[Configuration, str] = {}
    lines = ["digraph {\n", "  node [shape=box, fontname=monospace];\n"]
    for number, graph in enumerate(graphs):
        lines.append(f"  subgraph cluster_{number} {{\n")
        lines.append(f'    label="initial {graph.root.state!r}";\n')
        for node in graph.nodes:
            if node in ids:
                continue
            ids[node] = f"n{len(ids)}"
            residue = "ε" if node.terminated else f"#{hash(node.program) & 0xFFFF:04x}"
            text = f"{residue} {node.state!r}".replace('"', '\\"')
            tooltip = show(node.program).replace('"', '\\"')
            style = ", style=bold" if node in graph.blocked else ""
            lines.append(f'    {ids[node]} [label="{text}", tooltip="{tooltip}"{style}];\n')
        lines.append("  }\n")
    for graph in graphs:
        for edge in graph.edges:
            style = "" if edge.label == INTERNAL else ", style=dashed"
            lines.append(f'  {ids[edge.source]} -> {ids[edge.target]} [label="{edge.label}"{style}];\n')
    lines.append("}\n")
    return "".join(lines)
