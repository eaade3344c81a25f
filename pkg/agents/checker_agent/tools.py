"""Checker Agent Tools - Using @tool decorator"""
from langchain_core.tools import tool
from typing import Dict, Any
import sys
from pathlib import Path

try:
    from ...engine.checker import Bracket, SpecifiedProgram, check, check_invariant
    from ...engine.config import DEFAULT_BUDGET
    from ...engine.errors import SpecificationError
    from ...engine.parser import parse_source
except ImportError:
    parent_dir = str(Path(__file__).parent.parent.parent)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)
    from engine.checker import Bracket, SpecifiedProgram, check, check_invariant
    from engine.config import DEFAULT_BUDGET
    from engine.errors import SpecificationError
    from engine.parser import parse_source

MODES = ("auto", "lsp", "lsps")


def _specified(source, mode: str) -> SpecifiedProgram:
    if mode not in MODES:
        raise SpecificationError(f"unknown mode {mode}")
    specified = source.specified
    if mode == "auto":
        return specified
    bracket = Bracket.SQUARE if mode == "lsps" else Bracket.CURLY
    return SpecifiedProgram(specified.program, specified.spec, bracket)


@tool
def check_specified_program(source_text: str, mode: str = "auto", budget: int = DEFAULT_BUDGET) -> Dict[str, Any]:
    """
    Decide whether the file's program satisfies its specification.

    Args:
        source_text: Full text of the source file
        mode: "lsp" (curly brackets), "lsps" (square brackets) or "auto" (as written)
        budget: Maximum number of configurations to explore

    Returns:
        Report dictionary with verdict, violated clause, counterexample trace and statistics
    """
    source = parse_source(source_text)
    specified = _specified(source, mode)
    report = check(specified, source.structure, source.witness, budget)
    result = report.to_dict()
    result["mode"] = "lsps" if specified.square else "lsp"
    return result


@tool
def check_reachable_invariant(source_text: str, budget: int = DEFAULT_BUDGET) -> Dict[str, Any]:
    """
    Decide whether the file's invariant holds in every reachable configuration.

    Args:
        source_text: Full text of the source file
        budget: Maximum number of configurations to explore

    Returns:
        Report dictionary; the violated clause is "invariant" when a reachable state breaks it
    """
    source = parse_source(source_text)
    if source.invariant is None:
        raise SpecificationError("the file has no invariant section")
    report = check_invariant(source.specified, source.invariant, source.structure, source.witness, budget)
    return report.to_dict()
