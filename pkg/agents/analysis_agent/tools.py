"""Analysis Agent Tools - Using @tool decorator"""
from langchain_core.tools import tool
from typing import Dict, Any, List, Optional
import sys
from pathlib import Path

try:
    from ...engine.checker import strongest_relations
    from ...engine.config import DEFAULT_BUDGET
    from ...engine.errors import SpecificationError
    from ...engine.graph import CLIP, build_config_graph, to_dot
    from ...engine.operators import relation_to_assertion
    from ...engine.parser import parse_source
    from ...engine.printer import pretty, show
    from ...engine.removal import erase_auxiliary
except ImportError:
    parent_dir = str(Path(__file__).parent.parent.parent)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)
    from engine.checker import strongest_relations
    from engine.config import DEFAULT_BUDGET
    from engine.errors import SpecificationError
    from engine.graph import CLIP, build_config_graph, to_dot
    from engine.operators import relation_to_assertion
    from engine.parser import parse_source
    from engine.printer import pretty, show
    from engine.removal import erase_auxiliary


@tool
def compute_strongest(source_text: str, what: str = "guar", budget: int = DEFAULT_BUDGET) -> Dict[str, Any]:
    """
    Compute the strongest eff, wait or guar relation of the file's program
    under the pre- and rely-condition of its specification.

    Args:
        source_text: Full text of the source file
        what: "eff", "wait" or "guar"
        budget: Maximum number of configurations to explore

    Returns:
        Dictionary with the relation's variables, its elements, an assertion denoting it and statistics
    """
    source = parse_source(source_text)
    specified = source.specified
    spec = specified.spec
    result = strongest_relations(specified.program, spec.glo, spec.pre, spec.rely, what, source.structure, budget)
    return {
        "verdict": "valid",
        "what": what,
        "variables": sorted(result.relation.variables),
        "size": len(result.relation),
        "elements": result.relation.to_list(),
        "assertion": show(relation_to_assertion(result.relation)),
        "statistics": result.statistics,
    }


@tool
def erase_aux(source_text: str, aux: Optional[List[str]] = None) -> Dict[str, Any]:
    """
    Strip auxiliary variables from the file's witness (or program when there is no witness).

    Args:
        source_text: Full text of the source file
        aux: Auxiliary variables to remove; defaults to the aux set of the specification

    Returns:
        Dictionary with the plain program as single-line and laid-out text
    """
    source = parse_source(source_text)
    program = source.witness if source.witness is not None else source.program
    if program is None:
        raise SpecificationError("the file has neither a witness nor a program section")
    if aux is None:
        if source.specification is None:
            raise SpecificationError("give --aux or a spec section naming the auxiliary variables")
        aux = sorted(source.specification.aux)
    plain = erase_auxiliary(program, frozenset(aux))
    return {"verdict": "valid", "aux": sorted(aux), "program": show(plain), "layout": pretty(plain)}


@tool
def emit_graph(source_text: str, output_path: str, budget: int = DEFAULT_BUDGET) -> Dict[str, Any]:
    """
    Write the configuration graphs of the file's program as Graphviz DOT text.

    Args:
        source_text: Full text of the source file
        output_path: File to write the DOT text to
        budget: Maximum number of configurations to explore

    Returns:
        Dictionary with the output path and graph sizes
    """
    source = parse_source(source_text)
    specified = source.specified
    program = source.witness if source.witness is not None else specified.program
    graphs = build_config_graph(
        program, specified.spec.pre, specified.spec.rely, specified.spec.scope, source.structure, budget, CLIP
    )
    Path(output_path).write_text(to_dot(graphs), encoding="utf-8")
    return {
        "verdict": "valid",
        "path": output_path,
        "graphs": len(graphs),
        "nodes": sum(len(g.nodes) for g in graphs),
        "edges": sum(len(g.edges) for g in graphs),
    }
