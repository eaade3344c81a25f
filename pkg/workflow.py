"""LangGraph Workflow - Verification pipeline with scheduler routing"""
from langgraph.graph import StateGraph, END
from langgraph.checkpoint.memory import MemorySaver
import sys
from pathlib import Path

# Handle imports
try:
    from .state import VerifyState
    from .agents.scheduler.agent import scheduler_node
    from .agents.parser_agent.agent import parser_agent_node
    from .agents.checker_agent.agent import checker_agent_node
    from .agents.prover_agent.agent import prover_agent_node
    from .agents.analysis_agent.agent import analysis_agent_node
    from .agents.report_agent.agent import report_agent_node
except ImportError:
    parent_dir = str(Path(__file__).parent)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)
    from state import VerifyState
    from agents.scheduler.agent import scheduler_node
    from agents.parser_agent.agent import parser_agent_node
    from agents.checker_agent.agent import checker_agent_node
    from agents.prover_agent.agent import prover_agent_node
    from agents.analysis_agent.agent import analysis_agent_node
    from agents.report_agent.agent import report_agent_node

STAGES = ("checker", "prover", "analysis")


def route_after_scheduler(state: VerifyState) -> str:
    """Route function - the parser runs unless the scheduler rejected the command."""
    if not state.get("should_continue", True):
        return "report"
    return "parser"


def route_after_parser(state: VerifyState) -> str:
    """
    Route function - picks the stage node recorded in workflow_step.
    A failed parse goes straight to the report.
    """
    workflow_step = state.get("workflow_step", "")
    if not state.get("should_continue", True) or workflow_step not in STAGES:
        return "report"
    return workflow_step


def build_workflow():
    """
    Build LangGraph workflow with scheduler routing.

    Flow:
    Scheduler → Parser → (Checker | Prover | Analysis) → Report

    Nodes never call each other: each returns the updated state and the
    edges below decide what runs next.
    """
    workflow = StateGraph(VerifyState)

    workflow.add_node("scheduler", scheduler_node)
    workflow.add_node("parser", parser_agent_node)
    workflow.add_node("checker", checker_agent_node)
    workflow.add_node("prover", prover_agent_node)
    workflow.add_node("analysis", analysis_agent_node)
    workflow.add_node("report", report_agent_node)

    workflow.set_entry_point("scheduler")

    workflow.add_conditional_edges(
        "scheduler",
        route_after_scheduler,
        {"parser": "parser", "report": "report"}
    )
    workflow.add_conditional_edges(
        "parser",
        route_after_parser,
        {"checker": "checker", "prover": "prover", "analysis": "analysis", "report": "report"}
    )

    # Every stage ends in the report
    for stage in STAGES:
        workflow.add_edge(stage, "report")
    workflow.add_edge("report", END)

    checkpointer = MemorySaver()
    app = workflow.compile(checkpointer=checkpointer)

    return app


if __name__ == "__main__":
    app = build_workflow()
    print("✅ LangGraph workflow built successfully!")
    print(f"   Entry: scheduler")
    print(f"   Nodes: {list(app.nodes.keys())}")
    print(f"   Flow: scheduler → parser → (checker | prover | analysis) → report")
