"""States and the finite structure that interprets declared sorts."""
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, Iterable, Iterator, Mapping, Tuple

from .errors import ValidationError
from .sorts import BOOL, Sort, SortKind


def render_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return "[" + ", ".join(render_value(v) for v in value) + "]"
    if isinstance(value, frozenset):
        return "{" + ", ".join(render_value(v) for v in sorted(value, key=_order_key)) + "}"
    return str(value)


def _order_key(value: Any):
    if isinstance(value, (tuple, frozenset)):
        return (len(value), render_value(value))
    return (0, value) if isinstance(value, int) else (1, str(value))


class State(Mapping):
    """Immutable, hashable valuation of unhooked variables."""

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, values: Mapping[str, Any] = ()):
        mapping = dict(values)
        self._items = tuple(sorted(mapping.items()))
        self._map = mapping
        self._hash = hash(self._items)

    def __getitem__(self, name: str) -> Any:
        return self._map[name]

    def __iter__(self) -> Iterator[str]:
        return (name for name, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, State):
            return self._hash == other._hash and self._items == other._items
        return isinstance(other, Mapping) and dict(self._map) == dict(other)

    def __repr__(self) -> str:
        return "⟨" + ", ".join(f"{k}={render_value(v)}" for k, v in self._items) + "⟩"

    def set(self, name: str, value: Any) -> "State":
        mapping = dict(self._map)
        mapping[name] = value
        return State(mapping)

    def update(self, values: Mapping[str, Any]) -> "State":
        mapping = dict(self._map)
        mapping.update(values)
        return State(mapping)

    def project(self, names: Iterable[str]) -> "State":
        return State({n: self._map[n] for n in names if n in self._map})

    def without(self, names: Iterable[str]) -> "State":
        dropped = set(names)
        return State({k: v for k, v in self._items if k not in dropped})

    def to_dict(self) -> Dict[str, Any]:
        return {k: render_value(v) for k, v in self._items}


def freeze(values: Mapping[str, Any], names: Iterable[str]) -> State:
    return State({n: values[n] for n in names})


@dataclass
class Structure:
    """Declared sorts and variables; the interpretation is fixed by the sort kinds.

    ``cache`` memoises relation extensions keyed by term and variable set;
    it is only valid for this structure and its variable table.
    """

    sorts: Dict[str, Sort] = field(default_factory=dict)
    variables: Dict[str, Sort] = field(default_factory=dict)
    cache: Dict[Any, Any] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.sorts.setdefault("bool", BOOL)

    def sort(self, name: str) -> Sort:
        try:
            return self.sorts[name]
        except KeyError:
            raise ValidationError(f"unknown sort {name}") from None

    def sort_of(self, name: str) -> Sort:
        try:
            return self.variables[name]
        except KeyError:
            raise ValidationError(f"unknown variable {name}") from None

    def carrier(self, name: str) -> Tuple[Any, ...]:
        return self.sort_of(name).carrier

    def declares(self, name: str) -> bool:
        return name in self.variables

    def enum_constants(self) -> Dict[str, Sort]:
        return {
            const: sort
            for sort in self.sorts.values()
            if sort.kind is SortKind.ENUM
            for const in sort.constants
        }

    def states(self, names: Iterable[str]) -> Iterator[State]:
        """Every valuation of ``names`` in sorted name order."""
        ordered = sorted(set(names))
        carriers = [self.carrier(n) for n in ordered]
        for values in product(*carriers):
            yield State(dict(zip(ordered, values)))

    def size(self, names: Iterable[str]) -> int:
        total = 1
        for name in set(names):
            total *= len(self.carrier(name))
        return total

    def with_locals(self, declared: Mapping[str, Sort]) -> "Structure":
        """A structure that also knows ``declared``; caches are not shared."""
        if not declared or all(self.variables.get(n) == s for n, s in declared.items()):
            return self
        variables = dict(self.variables)
        variables.update(declared)
        return Structure(self.sorts, variables)
