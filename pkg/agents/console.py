"""Progress output shared by the agent nodes; silent when the state is quiet"""
import sys
from pathlib import Path
from typing import Mapping, Optional

# Handle imports
try:
    from ..engine.errors import INPUT_ERRORS, BudgetExceeded
except ImportError:
    parent_dir = str(Path(__file__).parent.parent)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)
    from engine.errors import INPUT_ERRORS, BudgetExceeded


def say(state: Mapping, text: str = "") -> None:
    if not state.get("quiet"):
        print(text)


def banner(state: Mapping, title: str) -> None:
    say(state, f"\n{'='*60}")
    say(state, title)
    say(state, f"{'='*60}")


def failure_kind(exc: Exception) -> str:
    """"budget" for an exhausted budget, "input" for a problem with the file, "internal" otherwise."""
    if isinstance(exc, BudgetExceeded):
        return "budget"
    if isinstance(exc, INPUT_ERRORS):
        return "input"
    return "internal"


def fail(state: dict, stage: str, exc: Exception, kind: Optional[str] = None) -> dict:
    """Record a stage failure and stop the pipeline; routing sends the run to the report node."""
    say(state, f"❌ {stage} failed: {exc}")
    state["errors"].append(f"{stage}: {exc}")
    state["error_kind"] = kind or failure_kind(exc)
    state["should_continue"] = False
    state["workflow_step"] = "report"
    return state
