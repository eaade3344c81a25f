"""Finite computations and their parallel composition and decomposition."""
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import IncompatibleComputations
from .semantics import EXTERNAL, INTERNAL, Configuration, Edge, Interpreter, join
from .syntax import Par, Program

TERMINATED = "terminated"
DEADLOCKED = "deadlocked"
PREFIX = "prefix"


@dataclass(frozen=True)
class Computation:
    """Configurations c0..cn and the labels of the n transitions between them."""

    configurations: Tuple[Configuration, ...]
    labels: Tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.configurations) - 1:
            raise ValueError("a computation needs one label per transition")

    def __len__(self) -> int:
        return len(self.configurations)

    @property
    def root(self) -> Configuration:
        return self.configurations[0]

    def edges(self) -> List[Edge]:
        return [
            Edge(self.configurations[j], self.labels[j], self.configurations[j + 1])
            for j in range(len(self.labels))
        ]

    @classmethod
    def from_edges(cls, root: Configuration, edges: List[Edge]) -> "Computation":
        return cls((root,) + tuple(e.target for e in edges), tuple(e.label for e in edges))


def classify_computation(computation: Computation, interpreter: Interpreter) -> str:
    last = computation.configurations[-1]
    if last.terminated:
        return TERMINATED
    if not interpreter.step(last.program, last.state):
        return DEADLOCKED
    return PREFIX


def is_legal(computation: Computation, interpreter: Interpreter) -> bool:
    """Every i-edge is an internal transition and every e-edge keeps the program."""
    for edge in computation.edges():
        if edge.label == EXTERNAL:
            if edge.source.program != edge.target.program:
                return False
        elif edge.label == INTERNAL:
            steps = interpreter.step(edge.source.program, edge.source.state)
            if (edge.target.program, edge.target.state) not in steps:
                return False
        else:
            return False
    return True


def compose_computations(left: Computation, right: Computation) -> Computation:
    """Join two compatible computations into one of their parallel composition."""
    if len(left) != len(right):
        raise IncompatibleComputations(min(len(left), len(right)), "lengths differ")
    configurations = []
    for j, (a, b) in enumerate(zip(left.configurations, right.configurations)):
        if a.state != b.state:
            raise IncompatibleComputations(j, "states differ")
        configurations.append(Configuration(join(a.program, b.program), a.state))
    labels = []
    for j, (a, b) in enumerate(zip(left.labels, right.labels)):
        if a == INTERNAL and b == INTERNAL:
            raise IncompatibleComputations(j, "both components step internally")
        labels.append(INTERNAL if INTERNAL in (a, b) else EXTERNAL)
    return Computation(tuple(configurations), tuple(labels))


def decompose_computation(
    computation: Computation, interpreter: Interpreter
) -> Tuple[Computation, Computation]:
    """Split a computation of a parallel program into computations of its two arms.

    An internal step is charged to an arm that can make it on its own; when both can,
    the left arm takes it and both splits are legal.
    """
    root = computation.root
    if not isinstance(root.program, Par):
        raise IncompatibleComputations(0, "root program is not a parallel composition")
    left = [Configuration(root.program.left, root.state)]
    right = [Configuration(root.program.right, root.state)]
    left_labels: List[str] = []
    right_labels: List[str] = []
    for j, label in enumerate(computation.labels):
        source, target = computation.configurations[j], computation.configurations[j + 1]
        current_left, current_right = left[-1].program, right[-1].program
        if label == EXTERNAL:
            left.append(Configuration(current_left, target.state))
            right.append(Configuration(current_right, target.state))
            left_labels.append(EXTERNAL)
            right_labels.append(EXTERNAL)
            continue
        moved = _which_moved(interpreter, source, target, current_left, current_right)
        if moved is None:
            raise IncompatibleComputations(j, "transition cannot be attributed to either arm")
        side, residue = moved
        if side == "left":
            left.append(Configuration(residue, target.state))
            right.append(Configuration(current_right, target.state))
            left_labels.append(INTERNAL)
            right_labels.append(EXTERNAL)
        else:
            left.append(Configuration(current_left, target.state))
            right.append(Configuration(residue, target.state))
            left_labels.append(EXTERNAL)
            right_labels.append(INTERNAL)
    return (
        Computation(tuple(left), tuple(left_labels)),
        Computation(tuple(right), tuple(right_labels)),
    )


def _which_moved(
    interpreter: Interpreter, source: Configuration, target: Configuration, current_left: Program, current_right: Program
) -> Optional[Tuple[str, Program]]:
    for rest, after in interpreter.step(current_left, source.state):
        if after == target.state and join(rest, current_right) == target.program:
            return ("left", rest)
    for rest, after in interpreter.step(current_right, source.state):
        if after == target.state and join(current_left, rest) == target.program:
            return ("right", rest)
    return None
