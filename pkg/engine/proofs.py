"""Proof trees: rule instances checked bottom-up, obligations discharged by enumeration."""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from .analysis import local_sorts
from .checker import CheckReport, SpecifiedProgram, Verdict, check, validate_specified
from .config import DEFAULT_BUDGET
from .errors import RGCheckError, SchemaError
from .logic import counterexample
from .operators import well_founded
from .printer import show
from .removal import Removal, check_removal
from .rules import VALID, WF, Obligation, RuleName, validate_rule_instance
from .structure import Structure
from .syntax import Program

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ProofNode:
    conclusion: SpecifiedProgram
    rule: RuleName
    premises: Tuple[Union["ProofNode", Removal], ...] = ()
    params: Mapping[str, Any] = field(default_factory=dict)
    witness: Optional[Program] = None


@dataclass
class ProofFailure:
    path: Tuple[str, ...]
    message: str
    obligation: Optional[Obligation] = None
    valuation: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "path": "/".join(self.path),
            "message": self.message,
            "obligation": None if self.obligation is None else {
                "kind": self.obligation.kind,
                "assertion": show(self.obligation.assertion),
                "description": self.obligation.description,
            },
            "valuation": self.valuation,
        }


@dataclass
class ProofReport:
    """Outcome of checking a proof tree; ``failures`` is in bottom-up order.

    ``exhausted`` holds the paths of semantic leaves that ran out of budget before a verdict.
    """

    depth: int
    hybrid: bool
    lsp_b: bool
    failures: List[ProofFailure] = field(default_factory=list)
    obligations: int = 0
    checks: List[CheckReport] = field(default_factory=list)
    exhausted: List[Tuple[str, ...]] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.failures and not self.exhausted

    @property
    def verdict(self) -> str:
        if self.failures:
            return "invalid"
        return "resource-exceeded" if self.exhausted else "valid"

    @property
    def failed_obligations(self) -> List[Obligation]:
        return [f.obligation for f in self.failures if f.obligation is not None]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "depth": self.depth,
            "hybrid": self.hybrid,
            "lsp_b": self.lsp_b,
            "obligations": self.obligations,
            "failures": [f.to_dict() for f in self.failures],
            "exhausted": ["/".join(path) for path in self.exhausted],
        }


def _valuation(pair) -> Dict[str, Any]:
    old, new = pair
    values = {} if old is None else {f"'{k}": v for k, v in old.to_dict().items()}
    values.update(new.to_dict())
    return values


def discharge_obligation(obligation: Obligation, structure: Structure) -> bool:
    """Decide an obligation over the finite carriers; results are memoised per structure."""
    key = ("obligation", obligation.kind, obligation.assertion, obligation.scope)
    if key not in structure.cache:
        if obligation.kind == WF:
            structure.cache[key] = well_founded(obligation.assertion, structure, obligation.scope)
        elif obligation.kind == VALID:
            structure.cache[key] = counterexample(obligation.assertion, structure) is None
        else:
            raise ValueError(f"unknown obligation kind {obligation.kind}")
    return structure.cache[key]


def _collect_locals(node: Union[ProofNode, Removal], structure: Structure, found: Dict[str, Any]) -> None:
    if isinstance(node, Removal):
        found.update(local_sorts(node.augmented, structure))
        return
    found.update(local_sorts(node.conclusion.program, structure))
    if node.witness is not None:
        found.update(local_sorts(node.witness, structure))
    for premise in node.premises:
        _collect_locals(premise, structure, found)


class _TreeChecker:
    def __init__(self, structure: Structure, lsp_b: bool, budget: int):
        self.structure = structure
        self.lsp_b = lsp_b
        self.budget = budget
        self.report = ProofReport(depth=0, hybrid=False, lsp_b=lsp_b)

    def fail(self, path, message: str, **extra) -> None:
        logger.info("proof node %s rejected: %s", "/".join(path) or "root", message)
        self.report.failures.append(ProofFailure(tuple(path), message, **extra))

    def visit(self, node: Union[ProofNode, Removal], path: Tuple[str, ...]) -> int:
        if isinstance(node, Removal):
            here = path + ("removal",)
            if self.lsp_b:
                self.fail(here, "removal leaves are not part of the restricted system")
            elif not check_removal(node):
                self.fail(here, "the augmented program does not reduce to the plain program")
            return 0

        here = path + (node.rule.value,)
        if self.lsp_b and node.rule is RuleName.INTRODUCTION:
            self.fail(here, "the introduction rule is not part of the restricted system")
        try:
            validate_specified(node.conclusion.program, node.conclusion.spec, self.structure)
        except RGCheckError as exc:
            self.fail(here, f"ill-formed conclusion: {exc}")

        depths = [self.visit(p, here + (str(i),)) for i, p in enumerate(node.premises)]
        premises = [p.conclusion if isinstance(p, ProofNode) else p for p in node.premises]
        try:
            obligations = validate_rule_instance(node.rule, premises, node.conclusion, node.params)
        except SchemaError as exc:
            self.fail(here, str(exc))
            obligations = []
        self._discharge(obligations, here)
        if node.rule is RuleName.CHECK:
            self._semantic(node, here)
        return 1 + max(depths, default=0)

    def _discharge(self, obligations: List[Obligation], here) -> None:
        for obligation in obligations:
            self.report.obligations += 1
            if discharge_obligation(obligation, self.structure):
                continue
            valuation = None
            if obligation.kind == VALID:
                pair = counterexample(obligation.assertion, self.structure)
                valuation = _valuation(pair) if pair is not None else None
            self.fail(here, f"obligation not discharged: {obligation.description}",
                      obligation=obligation, valuation=valuation)

    def _semantic(self, node: ProofNode, here) -> None:
        self.report.hybrid = True
        try:
            result = check(node.conclusion, self.structure, node.witness, self.budget)
        except RGCheckError as exc:
            self.fail(here, f"semantic check raised: {exc}")
            return
        self.report.checks.append(result)
        if result.verdict is Verdict.RESOURCE_EXCEEDED:
            logger.warning("semantic leaf %s ran out of budget", "/".join(here))
            self.report.exhausted.append(here)
        elif not result.valid:
            self.fail(here, f"semantic check {result.verdict.value}: {result.clause.value}")


def check_proof_tree(
    root: ProofNode, structure: Structure, lsp_b: bool = False, budget: int = DEFAULT_BUDGET
) -> ProofReport:
    """Check every node of ``root`` and report depth, failures and whether semantic leaves were used."""
    declared: Dict[str, Any] = {}
    _collect_locals(root, structure, declared)
    checker = _TreeChecker(structure.with_locals(declared), lsp_b, budget)
    checker.report.depth = checker.visit(root, ())
    report = checker.report
    logger.info(
        "proof of depth %d: %d obligations, %d failures%s",
        report.depth, report.obligations, len(report.failures), " (hybrid)" if report.hybrid else "",
    )
    return report


def export_obligations(obligations: List[Obligation]) -> str:
    """Failed obligations as source text that the parser reads back."""
    lines = []
    for obligation in obligations:
        lines.append(f"// {obligation.origin[0]}: {obligation.description}")
        lines.append(f"obligation {obligation.kind} {show(obligation.assertion)};")
    return "\n".join(lines) + ("\n" if lines else "")
