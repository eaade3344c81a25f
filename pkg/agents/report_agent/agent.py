"""Report Agent Node - Renders the report and fixes the exit status"""
import sys
from pathlib import Path

# Handle imports
try:
    from ...state import VerifyState
    from ..console import banner, say
    from .tools import exit_status, render_report
except ImportError:
    parent_dir = str(Path(__file__).parent.parent.parent)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)
    from state import VerifyState
    from agents.console import banner, say
    from agents.report_agent.tools import exit_status, render_report


def report_agent_node(state: VerifyState) -> VerifyState:
    """
    Report Agent Node - Last node of every run.
    Failed runs arrive here directly from the stage that failed.
    """
    banner(state, "🤖 REPORT AGENT")
    say(state, f"📥 Received state from: {state.get('current_agent', 'unknown')}")

    report = state.get("report")
    if state.get("error_kind") == "input":
        report = None
    state["output"] = render_report.invoke({
        "command": state.get("command", ""),
        "report": report,
        "errors": state.get("errors", []),
        "json_output": state.get("json_output", False),
    })
    state["exit_code"] = exit_status.invoke({"report": report, "error_kind": state.get("error_kind")})
    state["current_agent"] = "report"
    state["workflow_step"] = "done"
    say(state, f"✅ Exit status: {state['exit_code']}")
    return state
