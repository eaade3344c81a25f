"""State definition for the rgcheck LangGraph workflow"""
from typing import TypedDict, Optional, List, Dict, Any


class VerifyState(TypedDict, total=False):
    """State schema shared by every workflow node; values stay JSON-friendly for the checkpointer"""
    # Command
    command: str  # "check" | "prove" | "strongest" | "erase" | "graph"
    source_path: str
    source_text: str
    options: Dict[str, Any]  # mode, budget, what, aux, emit, export_failed

    # Parsing
    parsed: Optional[Dict[str, Any]]  # variables, sections, violations, notes

    # Results
    report: Optional[Dict[str, Any]]  # machine-readable report of the stage that ran
    output: str  # rendered report
    exit_code: int
    error_kind: Optional[str]  # "input" | "budget"

    # Control
    current_agent: str
    workflow_step: str
    errors: List[str]
    should_continue: bool
    quiet: bool
    json_output: bool
