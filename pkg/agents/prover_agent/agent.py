"""Prover Agent Node - Proof-tree checking"""
import sys
from pathlib import Path

# Handle imports
try:
    from ...state import VerifyState
    from ...engine.errors import RGCheckError
    from ..console import banner, fail, say
    from .tools import check_proof
except ImportError:
    parent_dir = str(Path(__file__).parent.parent.parent)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)
    from state import VerifyState
    from engine.errors import RGCheckError
    from agents.console import banner, fail, say
    from agents.prover_agent.tools import check_proof


def prover_agent_node(state: VerifyState) -> VerifyState:
    """
    Prover Agent Node - Checks every rule instance of the proof tree
    and discharges the obligations they leave open.
    """
    banner(state, "🤖 PROVER AGENT")
    say(state, "Agent activated. My tools:")
    say(state, f"  - {check_proof.name}")
    say(state)
    say(state, f"📥 Received state from: {state.get('current_agent', 'unknown')}")
    say(state)

    state["current_agent"] = "prover"
    options = state["options"]
    try:
        say(state, "📋 Checking proof...")
        report = check_proof.invoke({
            "source_text": state["source_text"],
            "budget": options.get("budget"),
            "export_dir": options.get("export_failed"),
        })
    except RGCheckError as exc:
        return fail(state, "prover", exc)

    say(state, f"   ✅ Depth: {report['depth']}, obligations: {report['obligations']}")
    say(state, f"   ✅ Verdict: {report['verdict']}")
    for path in report.get("exported", []):
        say(state, f"   📝 Exported {path}")
    if report["verdict"] == "resource-exceeded":
        state["error_kind"] = "budget"
    state["report"] = report
    state["should_continue"] = True
    state["workflow_step"] = "report"
    say(state, "📤 My work is done. Passing state to Report Agent")
    return state
