"""Analysis Agent Node - Strongest relations, auxiliary erasure and graph export"""
import sys
from pathlib import Path

# Handle imports
try:
    from ...state import VerifyState
    from ...engine.errors import RGCheckError
    from ..console import banner, fail, say
    from .tools import compute_strongest, emit_graph, erase_aux
except ImportError:
    parent_dir = str(Path(__file__).parent.parent.parent)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)
    from state import VerifyState
    from engine.errors import RGCheckError
    from agents.console import banner, fail, say
    from agents.analysis_agent.tools import compute_strongest, emit_graph, erase_aux


def analysis_agent_node(state: VerifyState) -> VerifyState:
    """
    Analysis Agent Node - Runs the command-specific analysis:
    - "strongest" → compute_strongest
    - "erase" → erase_aux
    - "graph" → emit_graph
    """
    banner(state, "🤖 ANALYSIS AGENT")
    say(state, "Agent activated. My tools:")
    for tool in (compute_strongest, erase_aux, emit_graph):
        say(state, f"  - {tool.name}")
    say(state)
    say(state, f"📥 Received state from: {state.get('current_agent', 'unknown')}")
    say(state)

    state["current_agent"] = "analysis"
    command = state["command"]
    options = state["options"]
    text = state["source_text"]
    try:
        if command == "strongest":
            say(state, f"📋 Computing strongest {options.get('what', 'guar')} relation...")
            report = compute_strongest.invoke(
                {"source_text": text, "what": options.get("what", "guar"), "budget": options.get("budget")}
            )
            say(state, f"   ✅ {report['size']} elements over {', '.join(report['variables'])}")
        elif command == "erase":
            say(state, "📋 Erasing auxiliary structure...")
            report = erase_aux.invoke({"source_text": text, "aux": options.get("aux")})
            say(state, f"   ✅ Removed {', '.join(report['aux']) or 'nothing'}")
        else:
            output_path = options.get("emit") or str(Path(state["source_path"]).with_suffix(".dot"))
            say(state, f"📋 Writing configuration graphs to {output_path}...")
            report = emit_graph.invoke({"source_text": text, "output_path": output_path, "budget": options.get("budget")})
            say(state, f"   ✅ {report['graphs']} graphs, {report['nodes']} nodes")
    except RGCheckError as exc:
        return fail(state, "analysis", exc)

    state["report"] = report
    state["should_continue"] = True
    state["workflow_step"] = "report"
    say(state, "📤 My work is done. Passing state to Report Agent")
    return state
