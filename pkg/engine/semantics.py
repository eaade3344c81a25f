"""Configurations and the internal and external transition relations."""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import CarrierOverflow, EvaluationError, RGCheckError
from .logic import eval_assertion, evaluate, solve
from .printer import show
from .relations import is_acyclic
from .structure import State, Structure
from .syntax import (
    EPSILON, Assign, Await, Block, Empty, If, Par, Program, Seq, Skip, Term, While,
)

logger = logging.getLogger(__name__)

INTERNAL = "i"
EXTERNAL = "e"


@dataclass(frozen=True)
class Configuration:
    program: Program
    state: State

    @property
    def terminated(self) -> bool:
        return isinstance(self.program, Empty)

    def __repr__(self) -> str:
        return f"⟨{show(self.program)}, {self.state!r}⟩"


@dataclass(frozen=True)
class Edge:
    source: Configuration
    label: str
    target: Configuration


def join(left: Program, right: Program) -> Program:
    """Parallel composition with ε absorbed."""
    if isinstance(left, Empty):
        return right
    if isinstance(right, Empty):
        return left
    return Par(left, right)


class Interpreter:
    """Internal transitions of programs, memoised per (program, state).

    ``limit`` bounds the isolated exploration of a single await body.
    """

    def __init__(self, structure: Structure, limit: int = 10 ** 6):
        self.structure = structure
        self.limit = limit
        self._memo: Dict[Tuple[Program, State], Tuple[Tuple[Program, State], ...]] = {}

    def holds(self, test: Term, state: State) -> bool:
        return eval_assertion(test, None, state, self.structure)

    def step(self, program: Program, state: State) -> Tuple[Tuple[Program, State], ...]:
        key = (program, state)
        cached = self._memo.get(key)
        if cached is None:
            cached = tuple(self._step(program, state))
            self._memo[key] = cached
        return cached

    def _step(self, program: Program, state: State) -> List[Tuple[Program, State]]:
        if isinstance(program, Skip):
            return [(EPSILON, state)]
        if isinstance(program, Assign):
            value = evaluate(program.expr, self.structure, None, state)
            sort = self.structure.sort_of(program.var)
            if not sort.contains(value):
                raise CarrierOverflow(
                    f"value {value!r} assigned to {program.var} lies outside {sort.describe()}",
                    valuation=state.to_dict(),
                )
            return [(EPSILON, state.set(program.var, value))]
        if isinstance(program, Block):
            return [(program.body, state)]
        if isinstance(program, Seq):
            return [
                (program.second if isinstance(rest, Empty) else Seq(rest, program.second), after)
                for rest, after in self.step(program.first, state)
            ]
        if isinstance(program, If):
            return [(program.then if self.holds(program.test, state) else program.orelse, state)]
        if isinstance(program, While):
            if self.holds(program.test, state):
                return [(Seq(program.body, program), state)]
            return [(EPSILON, state)]
        if isinstance(program, Par):
            left = [(join(rest, program.right), after) for rest, after in self.step(program.left, state)]
            right = [(join(program.left, rest), after) for rest, after in self.step(program.right, state)]
            return left + right
        if isinstance(program, Await):
            if not self.holds(program.test, state):
                return []
            finals, stuck = self.run_isolated(program.body, state)
            results = [(EPSILON, final) for final in finals]
            if stuck:
                results.append((program, state))
            return results
        if isinstance(program, Empty):
            return []
        raise TypeError(f"not a program: {program!r}")

    def run_isolated(self, body: Program, state: State) -> Tuple[List[State], bool]:
        """Final states of ``body`` run without interference, and whether some run diverges or blocks."""
        root = (body, state)
        seen = {root}
        order = [root]
        successors: Dict[tuple, Tuple[tuple, ...]] = {}
        queue = deque([root])
        finals: List[State] = []
        stuck = False
        while queue:
            node = queue.popleft()
            if isinstance(node[0], Empty):
                finals.append(node[1])
                successors[node] = ()
                continue
            following = self.step(*node)
            successors[node] = following
            if not following:
                stuck = True
            for nxt in following:
                if nxt not in seen:
                    if len(seen) >= self.limit:
                        raise EvaluationError("await body exploration exceeded the configuration limit")
                    seen.add(nxt)
                    order.append(nxt)
                    queue.append(nxt)
        if not stuck and not is_acyclic(order, successors):
            stuck = True
        return sorted(set(finals), key=repr), stuck


@dataclass
class Environment:
    """Interference allowed by a rely-condition: changes outside ``hidden`` satisfying ``rely``."""

    rely: Term
    hidden: FrozenSet[str]
    scope: FrozenSet[str]
    structure: Structure
    _cache: Dict[State, Tuple[State, ...]] = field(default_factory=dict, repr=False)

    @property
    def changeable(self) -> FrozenSet[str]:
        return self.scope - self.hidden

    def steps(self, state: State) -> Tuple[State, ...]:
        """Every state the environment can move to in one atomic step, stutter omitted."""
        cached = self._cache.get(state)
        if cached is None:
            names = sorted(self.changeable)
            fixed = state.without(names)
            cached = tuple(
                target
                for _, target in solve(
                    [(self.rely, True)], self.structure, old=state, new=fixed, free_new=names,
                )
                if target != state
            )
            self._cache[state] = cached
        return cached

    def allows(self, source: State, target: State) -> bool:
        if any(source[n] != target[n] for n in self.hidden if n in source):
            return False
        if any(source[n] != target[n] for n in source if n not in self.scope):
            return False
        return eval_assertion(self.rely, source, target, self.structure)


def successors(
    config: Configuration,
    kind: str,
    interpreter: Interpreter,
    environment: Optional[Environment] = None,
) -> List[Tuple[str, Configuration]]:
    """Labelled successors of ``config`` of the given kind."""
    if kind == INTERNAL:
        return [(INTERNAL, Configuration(p, s)) for p, s in interpreter.step(config.program, config.state)]
    if environment is None:
        raise ValueError("external successors need an environment")
    return [(EXTERNAL, Configuration(config.program, s)) for s in environment.steps(config.state)]


def replay_path(
    edges: Sequence[Edge],
    interpreter: Interpreter,
    environment: Optional[Environment] = None,
) -> bool:
    """Re-derive every edge of a path through ``successors``."""
    previous: Optional[Configuration] = None
    for edge in edges:
        if previous is not None and edge.source != previous:
            return False
        if edge.label == EXTERNAL and edge.source == edge.target:
            # implicit stutter under a reflexive rely
            previous = edge.target
            continue
        try:
            following = successors(edge.source, edge.label, interpreter, environment)
        except RGCheckError:
            return False
        if (edge.label, edge.target) not in following:
            return False
        previous = edge.target
    return True
