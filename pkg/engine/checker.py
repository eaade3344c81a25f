"""Satisfaction checks for specified programs and the strongest relations."""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Union

from .analysis import check_assertion, declared, globals_of, local_sorts
from .config import DEFAULT_BUDGET
from .errors import BudgetExceeded, SpecificationError
from .graph import CLIP, ConfigGraph, GraphBuilder
from .logic import eval_assertion, free_vars, has_hooks, resolve_frames
from .operators import is_reflexive, is_transitive_relation
from .printer import show
from .relations import StateRelation, StateSet
from .removal import Removal, check_removal
from .semantics import Edge, INTERNAL
from .structure import Structure
from .syntax import Program, Term

logger = logging.getLogger(__name__)


class Bracket(str, Enum):
    CURLY = "curly"
    SQUARE = "square"


class Verdict(str, Enum):
    VALID = "valid"
    INVALID = "invalid"
    RESOURCE_EXCEEDED = "resource-exceeded"


class Clause(str, Enum):
    CONVERGENCE = "convergence"
    GUAR = "guar"
    WAIT = "wait"
    EFF = "eff"
    AUX_REMOVAL = "aux-removal"
    LSPS_AWAIT_TERMINATION = "lsps-await-termination"
    INVARIANT = "invariant"


@dataclass(frozen=True)
class Specification:
    """(ϑ, α) :: (P, R, W, G, E); identity frames are resolved against ϑ ∪ α."""

    glo: FrozenSet[str]
    aux: FrozenSet[str]
    pre: Term
    rely: Term
    wait: Term
    guar: Term
    eff: Term

    def __post_init__(self):
        object.__setattr__(self, "glo", frozenset(self.glo))
        object.__setattr__(self, "aux", frozenset(self.aux))
        for name in ("pre", "rely", "wait", "guar", "eff"):
            object.__setattr__(self, name, resolve_frames(getattr(self, name), self.scope))

    @property
    def scope(self) -> FrozenSet[str]:
        return self.glo | self.aux

    def assertions(self) -> Dict[str, Term]:
        return {"pre": self.pre, "rely": self.rely, "wait": self.wait, "guar": self.guar, "eff": self.eff}

    def replace(self, **changes) -> "Specification":
        values = dict(glo=self.glo, aux=self.aux, **self.assertions())
        values.update(changes)
        return Specification(**values)


@dataclass(frozen=True)
class SpecifiedProgram:
    program: Program
    spec: Specification
    bracket: Bracket = Bracket.CURLY

    @property
    def square(self) -> bool:
        return self.bracket is Bracket.SQUARE


@dataclass
class CheckReport:
    verdict: Verdict
    clause: Optional[Clause] = None
    counterexample: List[Edge] = field(default_factory=list)
    statistics: Dict[str, int] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.verdict is Verdict.VALID

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "clause": self.clause.value if self.clause else None,
            "counterexample": [
                {
                    "label": edge.label,
                    "from": {"program": show(edge.source.program), "state": edge.source.state.to_dict()},
                    "to": {"program": show(edge.target.program), "state": edge.target.state.to_dict()},
                }
                for edge in self.counterexample
            ],
            "trace_length": len(self.counterexample),
            "clipped": self.statistics.get("truncated", 0),
            "statistics": dict(self.statistics),
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------- validation


def validate_specification(spec: Specification, structure: Structure) -> None:
    """Raise SpecificationError unless the specification is well formed."""
    problems = []
    if spec.glo & spec.aux:
        problems.append(f"glo and aux overlap on {sorted(spec.glo & spec.aux)}")
    for name, assertion in spec.assertions().items():
        outside = free_vars(assertion) - spec.scope
        if outside:
            problems.append(f"{name} mentions {sorted(outside)} outside glo ∪ aux")
            continue
        problems.extend(f"{name}: {p}" for p in check_assertion(assertion, structure, spec.scope))
    for name in ("pre", "wait"):
        if has_hooks(spec.assertions()[name]):
            problems.append(f"{name} must be unary")
    if problems:
        raise SpecificationError("; ".join(problems))
    if not is_reflexive(spec.rely, structure):
        problems.append("rely is not reflexive")
    if not is_transitive_relation(spec.rely, structure):
        problems.append("rely is not transitive")
    if not is_reflexive(spec.guar, structure):
        problems.append("guar is not reflexive")
    if problems:
        raise SpecificationError("; ".join(problems))


def validate_specified(program: Program, spec: Specification, structure: Structure) -> None:
    validate_specification(spec, structure)
    leaked = declared(program) & spec.scope
    if leaked:
        raise SpecificationError(f"local variables {sorted(leaked)} occur in glo ∪ aux")
    missing = globals_of(program) - spec.glo
    if missing:
        raise SpecificationError(f"globals {sorted(missing)} of the program are not in glo")


# ---------------------------------------------------------------- exploration


def _invalid(clause: Clause, trace: List[Edge], stats) -> CheckReport:
    logger.info("invalid: %s clause violated after %d steps", clause.value, len(trace))
    return CheckReport(Verdict.INVALID, clause, trace, dict(stats))


def _check_graph(graph: ConfigGraph, spec: Specification, structure: Structure, square: bool, stats):
    root_state = graph.root.state
    for node in graph.nodes:
        if node in graph.blocked and not eval_assertion(spec.wait, None, node.state, structure):
            return _invalid(Clause.WAIT, graph.path_to(node), stats)
        if node.terminated and not eval_assertion(spec.eff, root_state, node.state, structure):
            return _invalid(Clause.EFF, graph.path_to(node), stats)
        for edge in graph.outgoing.get(node, ()):
            if edge.label != INTERNAL:
                continue
            if square and edge.source.program == edge.target.program:
                return _invalid(Clause.LSPS_AWAIT_TERMINATION, graph.path_to(node) + [edge], stats)
            if not eval_assertion(spec.guar, edge.source.state, edge.target.state, structure):
                return _invalid(Clause.GUAR, graph.path_to(node) + [edge], stats)
    if not square:
        cycle = graph.divergent_cycle()
        if cycle is not None:
            return _invalid(Clause.CONVERGENCE, cycle, stats)
    return None


def _clipped_notes(statistics) -> List[str]:
    count = statistics.get("truncated", 0)
    if not count:
        return []
    return [f"{count} configurations assign a value outside a carrier and were not explored further"]


def _explore(
    program: Program, spec: Specification, structure: Structure, square: bool, budget: int
) -> CheckReport:
    builder = GraphBuilder(program, spec.pre, spec.rely, spec.scope, structure, budget, CLIP)
    local = builder.structure
    try:
        for graph in builder.graphs():
            failure = _check_graph(graph, spec, local, square, builder.statistics)
            if failure is not None:
                return failure
    except BudgetExceeded as exc:
        logger.warning("budget exhausted: %s", exc)
        return CheckReport(Verdict.RESOURCE_EXCEEDED, statistics=exc.statistics)
    logger.info("valid over %d initial states", builder.statistics.get("initial_states", 0))
    return CheckReport(Verdict.VALID, statistics=dict(builder.statistics), notes=_clipped_notes(builder.statistics))


def check_sat_noaux(sp: SpecifiedProgram, structure: Structure, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Satisfaction of a curly specified program with no auxiliary variables."""
    if sp.square:
        raise SpecificationError("check_sat_noaux needs a curly-bracket specified program")
    if sp.spec.aux:
        raise SpecificationError("auxiliary variables need a witness program")
    validate_specified(sp.program, sp.spec, structure)
    return _explore(sp.program, sp.spec, structure, False, budget)


def _with_witness(sp: SpecifiedProgram, witness: Optional[Program], structure: Structure, square: bool, budget: int):
    validate_specification(sp.spec, structure)
    if witness is None:
        if sp.spec.aux:
            raise SpecificationError("auxiliary variables need a witness program")
        witness = sp.program
    removal = Removal(witness, sp.spec.glo, sp.spec.aux, sp.program)
    if not check_removal(removal):
        report = CheckReport(Verdict.INVALID, Clause.AUX_REMOVAL)
        report.notes.append("the witness is not an augmentation of the program with the declared aux variables")
        return report
    flattened = sp.spec.replace(glo=sp.spec.scope, aux=frozenset())
    validate_specified(witness, flattened, structure)
    return _explore(witness, flattened, structure, square, budget)


def check_sat_general(
    sp: SpecifiedProgram, witness: Optional[Program], structure: Structure, budget: int = DEFAULT_BUDGET
) -> CheckReport:
    """Satisfaction with auxiliary variables, established through a witness augmentation."""
    if sp.square:
        raise SpecificationError("check_sat_general needs a curly-bracket specified program")
    return _with_witness(sp, witness, structure, False, budget)


def check_sat_modified(
    sp: SpecifiedProgram, witness: Optional[Program], structure: Structure, budget: int = DEFAULT_BUDGET
) -> CheckReport:
    """Satisfaction of a square specified program: no convergence, await bodies must terminate."""
    if not sp.square:
        raise SpecificationError("check_sat_modified needs a square-bracket specified program")
    return _with_witness(sp, witness, structure, True, budget)


def check(
    sp: SpecifiedProgram, structure: Structure, witness: Optional[Program] = None, budget: int = DEFAULT_BUDGET
) -> CheckReport:
    """Dispatch to the check matching the bracket and auxiliary variables."""
    if sp.square:
        return check_sat_modified(sp, witness, structure, budget)
    if witness is None and not sp.spec.aux:
        return check_sat_noaux(sp, structure, budget)
    return check_sat_general(sp, witness, structure, budget)


def check_invariant(
    sp: SpecifiedProgram,
    invariant: Term,
    structure: Structure,
    witness: Optional[Program] = None,
    budget: int = DEFAULT_BUDGET,
) -> CheckReport:
    """Every reachable configuration's state satisfies ``invariant``."""
    program = witness if witness is not None else sp.program
    spec = sp.spec.replace(glo=sp.spec.scope, aux=frozenset()) if witness is not None else sp.spec
    problems = check_assertion(invariant, structure, spec.scope)
    if problems or has_hooks(invariant):
        raise SpecificationError("invariant must be a unary assertion: " + "; ".join(problems))
    if witness is not None and not check_removal(Removal(witness, sp.spec.glo, sp.spec.aux, sp.program)):
        return CheckReport(Verdict.INVALID, Clause.AUX_REMOVAL, notes=["the witness is not an augmentation of the program"])
    validate_specified(program, spec, structure)
    builder = GraphBuilder(program, spec.pre, spec.rely, spec.scope, structure, budget, CLIP)
    try:
        for graph in builder.graphs():
            for node in graph.nodes:
                if not eval_assertion(invariant, None, node.state, builder.structure):
                    return _invalid(Clause.INVARIANT, graph.path_to(node), builder.statistics)
    except BudgetExceeded as exc:
        return CheckReport(Verdict.RESOURCE_EXCEEDED, statistics=exc.statistics)
    return CheckReport(Verdict.VALID, statistics=dict(builder.statistics), notes=_clipped_notes(builder.statistics))


# ---------------------------------------------------------------- strongest relations

EFF = "eff"
WAIT = "wait"
GUAR = "guar"


@dataclass
class StrongestResult:
    which: str
    relation: Union[StateRelation, StateSet]
    statistics: Dict[str, int]


def strongest_relations(
    program: Program,
    glo: Iterable[str],
    pre: Term,
    rely: Term,
    which: str,
    structure: Structure,
    budget: int = DEFAULT_BUDGET,
) -> StrongestResult:
    """The least eff, wait or guar relation of ``program`` closed with respect to ``glo``.

    Configurations whose internal step leaves a carrier are treated as
    exploration boundaries and counted in the ``truncated`` statistic.
    """
    if which not in (EFF, WAIT, GUAR):
        raise ValueError(f"unknown relation {which}")
    glo = frozenset(glo)
    pre = resolve_frames(pre, glo)
    rely = resolve_frames(rely, glo)
    if not is_reflexive(rely, structure) or not is_transitive_relation(rely, structure):
        raise SpecificationError("rely must be reflexive and transitive")
    builder = GraphBuilder(program, pre, rely, glo, structure, budget, CLIP)
    pairs = set()
    states = set()
    reached = set()
    for graph in builder.graphs():
        start = graph.root.state.project(glo)
        reached.update(n.state.project(glo) for n in graph.nodes)
        if which == EFF:
            pairs.update((start, n.state.project(glo)) for n in graph.terminal())
        elif which == WAIT:
            states.update(n.state.project(glo) for n in graph.blocked)
        else:
            pairs.update((e.source.state.project(glo), e.target.state.project(glo)) for e in graph.internal_edges())
    if which == GUAR:
        pairs.update((s, s) for s in reached)
    relation = StateSet(glo, frozenset(states)) if which == WAIT else StateRelation(glo, frozenset(pairs))
    logger.info("strongest %s: %d elements", which, len(relation))
    return StrongestResult(which, relation, dict(builder.statistics))
