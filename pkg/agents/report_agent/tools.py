"""Report Agent Tools - Using @tool decorator"""
from langchain_core.tools import tool
from typing import Dict, Any, List, Optional
import json

EXIT_VALID = 0
EXIT_INVALID = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


def _trace_lines(trace: List[Dict[str, Any]]) -> List[str]:
    if not trace:
        return []
    lines = [f"trace ({len(trace)} steps):"]
    first = trace[0]["from"]
    lines.append(f"  {first['program']}  {first['state']}")
    for step in trace:
        target = step["to"]
        lines.append(f"    --{step['label']}-->")
        lines.append(f"  {target['program']}  {target['state']}")
    return lines


def _render_text(command: str, report: Dict[str, Any]) -> str:
    verdict = f"verdict: {report['verdict']}"
    if report.get("clipped"):
        verdict += f" ({report['clipped']} configurations clipped at a carrier bound)"
    lines = [verdict]
    if report.get("clause"):
        lines.append(f"clause: {report['clause']}")
    if command == "check":
        lines.append(f"mode: {report.get('mode', 'lsp')}")
        lines.extend(_trace_lines(report.get("counterexample", [])))
        if report.get("counterexample"):
            lines.append(f"trace_length: {report['trace_length']}")
    elif command == "prove":
        lines.append(f"depth: {report['depth']}")
        lines.append(f"obligations: {report['obligations']}")
        if report.get("hybrid"):
            lines.append("hybrid: semantic leaves were used")
        for failure in report.get("failures", []):
            lines.append(f"failure at {failure['path'] or 'root'}: {failure['message']}")
            if failure.get("obligation"):
                lines.append(f"  {failure['obligation']['kind']} {failure['obligation']['assertion']}")
            if failure.get("valuation"):
                values = ", ".join(f"{k}={v}" for k, v in failure["valuation"].items())
                lines.append(f"  counterexample: {values}")
        for path in report.get("exported", []):
            lines.append(f"exported: {path}")
        for path in report.get("exhausted", []):
            lines.append(f"budget exhausted at {path}")
    elif command == "strongest":
        lines.append(f"strongest {report['what']} over {', '.join(report['variables'])}: {report['size']} elements")
        lines.append(report["assertion"])
    elif command == "erase":
        lines.append(report["layout"])
    elif command == "graph":
        lines.append(f"wrote {report['graphs']} graphs ({report['nodes']} nodes, {report['edges']} edges) to {report['path']}")
    for note in report.get("notes", []):
        lines.append(f"note: {note}")
    if report.get("statistics"):
        stats = ", ".join(f"{k}={v}" for k, v in sorted(report["statistics"].items()))
        lines.append(f"statistics: {stats}")
    return "\n".join(lines)


@tool
def render_report(
    command: str, report: Optional[Dict[str, Any]], errors: List[str], json_output: bool = False
) -> str:
    """
    Render the final report as text or JSON.

    Args:
        command: The command that ran
        report: Report dictionary of the stage that ran, or None when the run failed early
        errors: Error messages collected by the workflow nodes
        json_output: Emit JSON instead of text

    Returns:
        The rendered report
    """
    if report is None:
        report = {"verdict": "error", "errors": list(errors)}
        if json_output:
            return json.dumps(report, indent=2, sort_keys=True)
        return "\n".join(["verdict: error"] + [f"error: {e}" for e in errors])
    if json_output:
        return json.dumps(report, indent=2, sort_keys=True)
    return _render_text(command, report)


@tool
def exit_status(report: Optional[Dict[str, Any]], error_kind: Optional[str] = None) -> int:
    """
    Map a report verdict (or the failure kind) to the process exit status.

    Args:
        report: Report dictionary, or None when the run failed early
        error_kind: "input", "budget" or "internal" when a stage failed

    Returns:
        0 valid, 1 invalid, 2 input error, 3 resource budget exhausted
    """
    if error_kind == "budget":
        return EXIT_BUDGET
    if report is None or error_kind == "input":
        return EXIT_INPUT
    verdict = report.get("verdict")
    if verdict == "valid":
        return EXIT_VALID
    if verdict == "resource-exceeded":
        return EXIT_BUDGET
    return EXIT_INVALID
