"""Checker Agent Node - Satisfaction and invariant checks"""
import sys
from pathlib import Path

# Handle imports
try:
    from ...state import VerifyState
    from ...engine.errors import RGCheckError
    from ..console import banner, fail, say
    from .tools import check_reachable_invariant, check_specified_program
except ImportError:
    parent_dir = str(Path(__file__).parent.parent.parent)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)
    from state import VerifyState
    from engine.errors import RGCheckError
    from agents.console import banner, fail, say
    from agents.checker_agent.tools import check_reachable_invariant, check_specified_program


def _merge(first: dict, second: dict) -> dict:
    merged = dict(second)
    merged["statistics"] = {
        key: first["statistics"].get(key, 0) + second["statistics"].get(key, 0)
        for key in set(first["statistics"]) | set(second["statistics"])
    }
    merged["notes"] = first["notes"] + second["notes"]
    merged["mode"] = first.get("mode")
    merged["clipped"] = max(first.get("clipped", 0), second.get("clipped", 0))
    return merged


def checker_agent_node(state: VerifyState) -> VerifyState:
    """
    Checker Agent Node - Explores the configuration graphs of the program.
    When the file carries an invariant and the specification holds, the
    invariant is checked as well and both reports are merged.
    """
    banner(state, "🤖 CHECKER AGENT")
    say(state, "Agent activated. My tools:")
    say(state, f"  - {check_specified_program.name}")
    say(state, f"  - {check_reachable_invariant.name}")
    say(state)
    say(state, f"📥 Received state from: {state.get('current_agent', 'unknown')}")
    say(state)

    state["current_agent"] = "checker"
    options = state["options"]
    budget = options.get("budget")
    try:
        say(state, f"📋 Checking satisfaction (mode {options.get('mode', 'auto')})...")
        report = check_specified_program.invoke(
            {"source_text": state["source_text"], "mode": options.get("mode", "auto"), "budget": budget}
        )
        say(state, f"   ✅ Verdict: {report['verdict']}")
        if report["verdict"] == "valid" and "invariant" in state["parsed"]["sections"]:
            say(state, "📋 Checking invariant...")
            invariant = check_reachable_invariant.invoke({"source_text": state["source_text"], "budget": budget})
            say(state, f"   ✅ Verdict: {invariant['verdict']}")
            report = _merge(report, invariant)
    except RGCheckError as exc:
        return fail(state, "checker", exc)

    if report["verdict"] == "resource-exceeded":
        state["error_kind"] = "budget"
    state["report"] = report
    state["should_continue"] = True
    state["workflow_step"] = "report"
    say(state, "📤 My work is done. Passing state to Report Agent")
    return state
