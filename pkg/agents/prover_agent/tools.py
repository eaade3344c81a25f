"""Prover Agent Tools - Using @tool decorator"""
from langchain_core.tools import tool
from typing import Dict, Any, List, Optional
import sys
from pathlib import Path

try:
    from ...engine.config import DEFAULT_BUDGET
    from ...engine.errors import SpecificationError
    from ...engine.parser import parse_source
    from ...engine.printer import show, show_declarations
    from ...engine.proofs import check_proof_tree, discharge_obligation, export_obligations
    from ...engine.rules import Obligation
except ImportError:
    parent_dir = str(Path(__file__).parent.parent.parent)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)
    from engine.config import DEFAULT_BUDGET
    from engine.errors import SpecificationError
    from engine.parser import parse_source
    from engine.printer import show, show_declarations
    from engine.proofs import check_proof_tree, discharge_obligation, export_obligations
    from engine.rules import Obligation


def _write_exports(source, obligations: List[Obligation], directory: str) -> List[str]:
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    header = show_declarations(source.structure, source.declarations)
    paths = []
    for number, obligation in enumerate(obligations):
        path = target / f"obligation_{number:03d}.rg"
        path.write_text(f"{header}\n{export_obligations([obligation])}", encoding="utf-8")
        paths.append(str(path))
    return paths


def _standalone(source) -> Dict[str, Any]:
    scope = frozenset(name for name, _ in source.declarations)
    failures = []
    for number, (kind, assertion) in enumerate(source.obligations):
        obligation = Obligation(kind, assertion, scope, ("obligation", number))
        if not discharge_obligation(obligation, source.structure):
            failures.append({
                "path": f"obligation/{number}",
                "message": "obligation not discharged",
                "obligation": {"kind": kind, "assertion": show(assertion), "description": ""},
                "valuation": None,
            })
    return {
        "verdict": "invalid" if failures else "valid",
        "depth": 0,
        "hybrid": False,
        "lsp_b": False,
        "obligations": len(source.obligations),
        "failures": failures,
        "exhausted": [],
    }


@tool
def check_proof(source_text: str, budget: int = DEFAULT_BUDGET, export_dir: Optional[str] = None) -> Dict[str, Any]:
    """
    Check the file's proof tree, or discharge its standalone obligations when it has no proof.

    Args:
        source_text: Full text of the source file
        budget: Maximum number of configurations for semantic leaves
        export_dir: Directory to write failed obligations to, one source file each

    Returns:
        Report dictionary with verdict, depth, hybrid flag, obligation count and failures
    """
    source = parse_source(source_text)
    if source.proof is None:
        if not source.obligations:
            raise SpecificationError("the file has neither a proof nor obligation sections")
        return _standalone(source)
    report = check_proof_tree(source.proof, source.structure, source.lsp_b, budget)
    result = report.to_dict()
    notes = []
    if source.program is not None and source.specification is not None:
        if source.proof.conclusion != source.specified:
            notes.append("the proof concludes a different specified program than the file's program and spec")
    result["notes"] = notes
    if export_dir and report.failed_obligations:
        result["exported"] = _write_exports(source, report.failed_obligations, export_dir)
    return result
