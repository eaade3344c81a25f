"""Finite sorts and their carriers."""
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, product
from typing import Any, Optional, Tuple

from .errors import ValidationError


class SortKind(str, Enum):
    BOOLEAN = "boolean"
    NATURAL = "natural"
    ENUM = "enum"
    SEQUENCE = "sequence"
    SET = "set"


@dataclass(frozen=True)
class Sort:
    """A declared sort with its finite, ordered carrier.

    Naturals carry a closed range ``low..high``; sequences hold tuples of
    at most ``max_length`` elements; sets hold frozensets over the element
    carrier. ``carrier`` is computed once at construction.
    """

    name: str
    kind: SortKind
    low: int = 0
    high: int = 0
    constants: Tuple[str, ...] = ()
    element: Optional["Sort"] = None
    max_length: int = 0
    carrier: Tuple[Any, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "carrier", self._build_carrier())
        if not self.carrier:
            raise ValidationError(f"sort {self.name} has an empty carrier")

    def _build_carrier(self) -> Tuple[Any, ...]:
        if self.kind is SortKind.BOOLEAN:
            return (False, True)
        if self.kind is SortKind.NATURAL:
            if self.low < 0 or self.high < self.low:
                raise ValidationError(f"sort {self.name}: bad range {self.low}..{self.high}")
            return tuple(range(self.low, self.high + 1))
        if self.kind is SortKind.ENUM:
            return tuple(self.constants)
        elements = self.element.carrier
        if self.kind is SortKind.SEQUENCE:
            return tuple(
                seq for length in range(self.max_length + 1) for seq in product(elements, repeat=length)
            )
        return tuple(
            frozenset(subset) for size in range(len(elements) + 1) for subset in combinations(elements, size)
        )

    def contains(self, value: Any) -> bool:
        if self.kind is SortKind.BOOLEAN:
            return isinstance(value, bool)
        if isinstance(value, bool):
            return False
        if self.kind is SortKind.NATURAL:
            return isinstance(value, int) and self.low <= value <= self.high
        if self.kind is SortKind.ENUM:
            return value in self.constants
        if self.kind is SortKind.SEQUENCE:
            return (
                isinstance(value, tuple)
                and len(value) <= self.max_length
                and all(self.element.contains(x) for x in value)
            )
        return isinstance(value, frozenset) and all(self.element.contains(x) for x in value)

    @property
    def first(self) -> Any:
        return self.carrier[0]

    def describe(self) -> str:
        if self.kind is SortKind.BOOLEAN:
            return "bool"
        if self.kind is SortKind.NATURAL:
            return f"{self.low}..{self.high}"
        if self.kind is SortKind.ENUM:
            return f"enum({', '.join(self.constants)})"
        if self.kind is SortKind.SEQUENCE:
            return f"seq({self.element.name}, {self.max_length})"
        return f"set({self.element.name})"


BOOL = Sort("bool", SortKind.BOOLEAN)


def natural(name: str, low: int, high: int) -> Sort:
    return Sort(name, SortKind.NATURAL, low=low, high=high)


def enumeration(name: str, *constants: str) -> Sort:
    return Sort(name, SortKind.ENUM, constants=tuple(constants))


def sequence(name: str, element: Sort, max_length: int) -> Sort:
    return Sort(name, SortKind.SEQUENCE, element=element, max_length=max_length)


def finite_set(name: str, element: Sort) -> Sort:
    return Sort(name, SortKind.SET, element=element)


# Type tags used by the sort checker: ("bool",), ("nat",), ("enum", name),
# ("seq", tag), ("set", tag) and ("any",) for empty literals.
ANY = ("any",)


def type_tag(sort: Sort) -> tuple:
    if sort.kind is SortKind.BOOLEAN:
        return ("bool",)
    if sort.kind is SortKind.NATURAL:
        return ("nat",)
    if sort.kind is SortKind.ENUM:
        return ("enum", sort.name)
    if sort.kind is SortKind.SEQUENCE:
        return ("seq", type_tag(sort.element))
    return ("set", type_tag(sort.element))


def tags_compatible(left: tuple, right: tuple) -> bool:
    if left == ANY or right == ANY:
        return True
    if left[0] != right[0]:
        return False
    if left[0] in ("seq", "set"):
        return tags_compatible(left[1], right[1])
    return left == right


def join_tags(left: tuple, right: tuple) -> tuple:
    if left == ANY:
        return right
    if right == ANY or left[0] not in ("seq", "set"):
        return left
    return (left[0], join_tags(left[1], right[1]))
