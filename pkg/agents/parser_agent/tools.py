"""Parser Agent Tools - Using @tool decorator"""
from langchain_core.tools import tool
from typing import Dict, Any
import sys
from pathlib import Path

try:
    from ...engine.analysis import await_test_notes, validate_program
    from ...engine.parser import parse_source
except ImportError:
    parent_dir = str(Path(__file__).parent.parent.parent)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)
    from engine.analysis import await_test_notes, validate_program
    from engine.parser import parse_source


@tool
def parse_source_file(source_text: str) -> Dict[str, Any]:
    """
    Parse an rgcheck source file and validate the programs it contains.

    Args:
        source_text: Full text of the source file

    Returns:
        Dictionary with declared variables, the sections present, constraint
        violations of the program and witness, and await-test notes
    """
    source = parse_source(source_text)
    violations = []
    notes = []
    for label, program in (("program", source.program), ("witness", source.witness)):
        if program is None:
            continue
        violations.extend(f"{label}: {violation}" for violation in validate_program(program, source.structure))
        notes.extend(await_test_notes(program))
    sections = [
        name
        for name, present in (
            ("program", source.program is not None),
            ("spec", source.specification is not None),
            ("witness", source.witness is not None),
            ("invariant", source.invariant is not None),
            ("proof", source.proof is not None),
            ("obligation", bool(source.obligations)),
        )
        if present
    ]
    return {
        "variables": dict(source.declarations),
        "sections": sections,
        "bracket": source.bracket.value,
        "violations": violations,
        "notes": notes,
    }
