"""Scheduler Agent Node - Validates the command and starts the pipeline at the parser"""
import sys
from pathlib import Path

# Handle imports
try:
    from ...state import VerifyState
    from ...engine.config import DEFAULT_BUDGET
    from ..console import banner, say
except ImportError:
    parent_dir = str(Path(__file__).parent.parent.parent)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)
    from state import VerifyState
    from engine.config import DEFAULT_BUDGET
    from agents.console import banner, say

COMMANDS = ("check", "prove", "strongest", "erase", "graph")
STAGE_FOR = {
    "check": "checker",
    "prove": "prover",
    "strongest": "analysis",
    "erase": "analysis",
    "graph": "analysis",
}


def scheduler_node(state: VerifyState) -> VerifyState:
    """
    Scheduler Agent Node - Entry point of every run.

    Checks that the command is known and that source text was loaded, then
    hands over to the parser. The stage after parsing is recorded in the
    options so the parser node can route to it:
    - "check" → Checker Agent
    - "prove" → Prover Agent
    - "strongest" | "erase" | "graph" → Analysis Agent
    """
    banner(state, "📅 SCHEDULER AGENT")

    command = state.get("command", "").lower()
    say(state, f"📋 Command: {command}")
    say(state, f"📋 Source: {state.get('source_path', 'not set')}")
    say(state)

    state["current_agent"] = "scheduler"
    if command not in COMMANDS:
        say(state, f"❌ Unknown command: {command}")
        say(state, f"   Valid commands: {', '.join(COMMANDS)}")
        state["errors"].append(f"scheduler: unknown command {command}")
        state["error_kind"] = "input"
        state["should_continue"] = False
        state["workflow_step"] = "report"
    elif not state.get("source_text"):
        say(state, "❌ Empty source file")
        state["errors"].append("scheduler: empty source file")
        state["error_kind"] = "input"
        state["should_continue"] = False
        state["workflow_step"] = "report"
    else:
        say(state, "✅ Routing to Parser Agent")
        state["options"]["stage"] = STAGE_FOR[command]
        if state["options"].get("budget") is None:
            state["options"]["budget"] = DEFAULT_BUDGET
        state["workflow_step"] = "parser"

    say(state)
    return state
