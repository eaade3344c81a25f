"""rgcheck command line - runs one command on one source file through the workflow"""
import asyncio
import argparse
import logging
import sys
import uuid
from pathlib import Path

from engine.config import load_settings
from state import VerifyState
from workflow import build_workflow

COMMANDS = ("check", "prove", "strongest", "erase", "graph")


def create_initial_state(command: str, source_path: str, source_text: str, options: dict,
                         quiet: bool = False, json_output: bool = False) -> VerifyState:
    """
    Create initial state for workflow.

    Args:
        command: One of check, prove, strongest, erase, graph
        source_path: Path of the source file
        source_text: Contents of the source file
        options: Command options (mode, budget, what, aux, emit, export_failed)
        quiet: Suppress progress banners
        json_output: Render the report as JSON
    """
    return {
        "command": command,
        "source_path": source_path,
        "source_text": source_text,
        "options": dict(options),
        "parsed": None,
        "report": None,
        "output": "",
        "exit_code": 2,
        "error_kind": None,
        "current_agent": "",
        "workflow_step": "",
        "errors": [],
        "should_continue": True,
        "quiet": quiet or json_output,
        "json_output": json_output,
    }


async def run_command(command: str, source_path: str, options: dict,
                      quiet: bool = False, json_output: bool = False) -> VerifyState:
    """Run one command through the workflow and return the final state."""
    try:
        source_text = Path(source_path).read_text(encoding="utf-8")
    except OSError as exc:
        source_text = ""
        logging.getLogger(__name__).error("cannot read %s: %s", source_path, exc)

    app = build_workflow()
    initial_state = create_initial_state(command, source_path, source_text, options, quiet, json_output)
    config = {"configurable": {"thread_id": f"{command}-{uuid.uuid4().hex[:8]}"}}
    return await app.ainvoke(initial_state, config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Check rely/guarantee specifications of shared-variable concurrent programs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python rgcheck.py check corpus/counter.rg                  # Satisfaction check
  python rgcheck.py check corpus/dekker.rg --mode lsps       # Nonterminating programs
  python rgcheck.py prove corpus/skip_consequence.rg         # Proof-tree check
  python rgcheck.py strongest corpus/strongest_guar.rg --what guar
  python rgcheck.py erase corpus/buff_done.rg --aux Done     # Strip auxiliary variables
  python rgcheck.py graph corpus/counter.rg --emit counter.dot

Exit status: 0 valid, 1 invalid, 2 input error, 3 budget exhausted
        """
    )
    parser.add_argument("command", choices=COMMANDS, help="What to do with the source file")
    parser.add_argument("file", help="Source file")
    parser.add_argument("--mode", choices=["auto", "lsp", "lsps"], default="auto",
                        help="check: curly (lsp) or square (lsps) satisfaction; default follows the file")
    parser.add_argument("--what", choices=["eff", "wait", "guar"], default="guar",
                        help="strongest: which relation to compute (default: guar)")
    parser.add_argument("--aux", type=str, default=None,
                        help="erase: comma-separated auxiliary variables (default: the spec's aux set)")
    parser.add_argument("--emit", type=str, default=None,
                        help="graph: output DOT file (default: FILE with .dot suffix)")
    parser.add_argument("--export-failed", type=str, default=None, metavar="DIR",
                        help="prove: write failed obligations to DIR as source files")
    parser.add_argument("--budget", type=int, default=None,
                        help="Maximum configurations to explore (default: RGCHECK_BUDGET or 1000000)")
    parser.add_argument("--json", action="store_true", help="Print the report as JSON")
    parser.add_argument("--quiet", action="store_true", default=None, help="Suppress progress banners")
    parser.add_argument("--log-level", type=str, default=None,
                        help="Logging level for engine messages on stderr (default: WARNING)")
    return parser


async def main() -> int:
    args = build_parser().parse_args()
    settings = load_settings().override(budget=args.budget, log_level=args.log_level, quiet=args.quiet)
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    options = {
        "mode": args.mode,
        "what": args.what,
        "aux": [a.strip() for a in args.aux.split(",") if a.strip()] if args.aux is not None else None,
        "emit": args.emit,
        "export_failed": args.export_failed,
        "budget": settings.budget,
    }
    final_state = await run_command(args.command, args.file, options, settings.quiet, args.json)
    print(final_state.get("output", ""))
    return final_state.get("exit_code", 2)


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
