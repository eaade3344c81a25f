"""Parser Agent Node - Parses and validates the source file"""
import sys
from pathlib import Path

# Handle imports
try:
    from ...state import VerifyState
    from ...engine.errors import RGCheckError
    from ..console import banner, fail, say
    from .tools import parse_source_file
except ImportError:
    parent_dir = str(Path(__file__).parent.parent.parent)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)
    from state import VerifyState
    from engine.errors import RGCheckError
    from agents.console import banner, fail, say
    from agents.parser_agent.tools import parse_source_file


def parser_agent_node(state: VerifyState) -> VerifyState:
    """
    Parser Agent Node - Turns source text into checked syntax.
    Syntax errors, unknown names and constraint violations stop the run.
    """
    banner(state, "🤖 PARSER AGENT")
    say(state, "Agent activated. My tools:")
    say(state, f"  - {parse_source_file.name}")
    say(state)
    say(state, f"📥 Received state from: {state.get('current_agent', 'unknown')}")
    say(state, f"📊 Source: {len(state.get('source_text', ''))} chars")
    say(state)

    state["current_agent"] = "parser"
    try:
        parsed = parse_source_file.invoke({"source_text": state["source_text"]})
    except RGCheckError as exc:
        return fail(state, "parser", exc)

    state["parsed"] = parsed
    say(state, f"   ✅ Sections: {', '.join(parsed['sections']) or 'none'}")
    say(state, f"   ✅ Variables: {len(parsed['variables'])}")
    for note in parsed["notes"]:
        say(state, f"   ⚠️ {note}")
    if parsed["violations"]:
        for violation in parsed["violations"]:
            say(state, f"   ❌ {violation}")
        state["errors"].extend(f"parser: {v}" for v in parsed["violations"])
        state["error_kind"] = "input"
        state["should_continue"] = False
        state["workflow_step"] = "report"
        return state

    state["should_continue"] = True
    state["workflow_step"] = state["options"]["stage"]
    say(state, f"📤 My work is done. Passing state to {state['workflow_step'].title()} Agent")
    return state
