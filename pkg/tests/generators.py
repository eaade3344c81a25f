"""Seeded generators for randomised tests: small programs, computations and relations."""
import random
from typing import Dict, FrozenSet, List, Sequence, Tuple

from engine.computations import Computation
from engine.semantics import EXTERNAL, INTERNAL, Configuration, Interpreter
from engine.structure import State, Structure
from engine.syntax import (
    TRUE, Apply, Assign, Await, If, Lit, Par, Program, Skip, Var, While, seq,
)

MODULUS = 3
LOOP = While(TRUE, Skip())


def _bump(name: str, step: int) -> Assign:
    return Assign(name, Apply("oplus", (Var(name), Lit(step)), MODULUS))


def _test(rng: random.Random, names: Sequence[str]) -> Apply:
    return Apply(rng.choice(["<", "=", "!="]), (Var(rng.choice(names)), Lit(rng.randrange(MODULUS))))


def random_statement(rng: random.Random, names: Sequence[str], depth: int = 2) -> Program:
    """A statement over ``names`` whose values stay inside 0..MODULUS-1; no parallel composition inside."""
    choice = rng.randrange(6 if depth > 0 else 3)
    if choice == 0:
        return Skip()
    if choice in (1, 2):
        return _bump(rng.choice(names), rng.randrange(1, MODULUS))
    if choice == 3:
        return If(_test(rng, names), random_statement(rng, names, depth - 1), random_statement(rng, names, depth - 1))
    if choice == 4:
        return While(_test(rng, names), _bump(rng.choice(names), 1))
    test = rng.choice([TRUE, _test(rng, names)])
    if rng.random() < 0.25:
        # an enabled await with this body steps to itself
        return Await(test, LOOP)
    return Await(test, _bump(rng.choice(names), 1))


def random_arm(rng: random.Random, names: Sequence[str], length: int = 3) -> Program:
    return seq(*(random_statement(rng, names) for _ in range(rng.randint(1, length))))


def random_par(rng: random.Random, names: Sequence[str]) -> Par:
    return Par(random_arm(rng, names), random_arm(rng, names))


def random_computation(
    rng: random.Random,
    program: Program,
    state: State,
    interpreter: Interpreter,
    states: List[State],
    steps: int = 12,
    interference: float = 0.25,
) -> Computation:
    """Random legal computation: internal steps where possible, occasional environment moves."""
    configurations = [Configuration(program, state)]
    labels = []
    for _ in range(steps):
        current = configurations[-1]
        options = [] if current.terminated else list(interpreter.step(current.program, current.state))
        if options and rng.random() >= interference:
            following, after = rng.choice(options)
            labels.append(INTERNAL)
        else:
            following, after = current.program, rng.choice(states)
            labels.append(EXTERNAL)
        configurations.append(Configuration(following, after))
    return Computation(tuple(configurations), tuple(labels))


def random_compatible_pair(
    rng: random.Random,
    left: Program,
    right: Program,
    state: State,
    interpreter: Interpreter,
    states: List[State],
    steps: int = 12,
    interference: float = 0.25,
) -> Tuple[Computation, Computation]:
    """Two legal computations over the same states in which at most one side steps internally at a time."""
    lefts, rights = [Configuration(left, state)], [Configuration(right, state)]
    left_labels, right_labels = [], []
    for _ in range(steps):
        current_left, current_right = lefts[-1], rights[-1]
        moves = [
            (side, following, after)
            for side, current in (("left", current_left), ("right", current_right))
            for following, after in interpreter.step(current.program, current.state)
        ]
        if moves and rng.random() >= interference:
            side, following, after = rng.choice(moves)
        else:
            side, following, after = "environment", None, rng.choice(states)
        lefts.append(Configuration(following if side == "left" else current_left.program, after))
        rights.append(Configuration(following if side == "right" else current_right.program, after))
        left_labels.append(INTERNAL if side == "left" else EXTERNAL)
        right_labels.append(INTERNAL if side == "right" else EXTERNAL)
    return (
        Computation(tuple(lefts), tuple(left_labels)),
        Computation(tuple(rights), tuple(right_labels)),
    )


def random_successors(rng: random.Random, size: int, density: float) -> Dict[int, FrozenSet[int]]:
    return {
        node: frozenset(t for t in range(size) if rng.random() < density)
        for node in range(size)
    }


def has_cycle(size: int, successors: Dict[int, FrozenSet[int]]) -> bool:
    """Depth-first colouring; the oracle for the well-foundedness tests."""
    colour = [0] * size

    def visit(node: int) -> bool:
        colour[node] = 1
        for target in successors.get(node, ()):
            if colour[target] == 1:
                return True
            if colour[target] == 0 and visit(target):
                return True
        colour[node] = 2
        return False

    return any(colour[n] == 0 and visit(n) for n in range(size))


def value_pairs(successors: Dict[int, FrozenSet[int]], name: str) -> FrozenSet[Tuple[State, State]]:
    return frozenset(
        (State({name: source}), State({name: target}))
        for source, targets in successors.items()
        for target in targets
    )


def all_states(structure: Structure, names: Sequence[str]) -> List[State]:
    return list(structure.states(names))
