"""Shared fixtures: repository imports, small structures and the example corpus."""
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from engine.parser import parse_source  # noqa: E402
from engine.sorts import BOOL, natural  # noqa: E402
from engine.structure import Structure  # noqa: E402

CORPUS = ROOT / "corpus"


def structure_of(high: int = 3, names=("x",), flags=()) -> Structure:
    """Naturals 0..high for ``names`` and booleans for ``flags``."""
    sort = natural("Val", 0, high)
    variables = {name: sort for name in names}
    variables.update({flag: BOOL for flag in flags})
    return Structure({"Val": sort}, variables)


def source_with(body: str, high: int = 3, names=("x",), flags=()) -> str:
    """Source text declaring Val = 0..high and the given variables ahead of ``body``."""
    lines = ["sorts", f"  Val = 0..{high};", "end", "vars"]
    if names:
        lines.append(f"  {', '.join(names)} : Val;")
    if flags:
        lines.append(f"  {', '.join(flags)} : bool;")
    lines.append("end")
    return "\n".join(lines) + "\n" + body


@pytest.fixture
def structure():
    return structure_of


@pytest.fixture
def source():
    """Parse a source body under generated declarations."""

    def build(body: str, high: int = 3, names=("x",), flags=()):
        return parse_source(source_with(body, high, names, flags))

    return build


@pytest.fixture
def corpus_path():
    def locate(name: str) -> Path:
        return CORPUS / name

    return locate


@pytest.fixture
def load_corpus():
    def load(name: str):
        return parse_source((CORPUS / name).read_text(encoding="utf-8"))

    return load
