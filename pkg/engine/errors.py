"""Exception hierarchy shared by every engine module."""
from typing import Any, Dict, Optional


class RGCheckError(Exception):
    """Base class for all engine failures."""

    kind = "error"


class SourceSyntaxError(RGCheckError):
    """Positioned syntax diagnostic raised by the source parser."""

    kind = "syntax"

    def __init__(self, message: str, line: int = 0, column: int = 0, expected: Optional[list] = None):
        self.line = line
        self.column = column
        self.expected = sorted(expected or [])
        location = f"{line}:{column}: " if line else ""
        super().__init__(f"{location}{message}")


class ValidationError(RGCheckError):
    """Unknown variable or sort; distinct from a constraint violation."""

    kind = "validation"


class EvaluationError(RGCheckError):
    """Carrier overflow, index out of range or an empty max/min."""

    kind = "evaluation"

    def __init__(self, message: str, valuation: Optional[Dict[str, Any]] = None, configuration: Any = None):
        self.valuation = valuation
        self.configuration = configuration
        super().__init__(message)


class CarrierOverflow(EvaluationError):
    """An assignment produced a value outside the variable's carrier."""


class SpecificationError(RGCheckError):
    """A specification or specified program breaks its well-formedness invariants."""

    kind = "specification"


class StructureError(RGCheckError):
    """A program is not in augmentation shape with respect to an aux set."""

    kind = "structure"


class SchemaError(RGCheckError):
    """A proof node does not match the schema of the rule it cites."""

    kind = "schema"

    def __init__(self, rule: str, field: str, expected: str):
        self.rule = rule
        self.field = field
        self.expected = expected
        super().__init__(f"{rule}: {field} must be {expected}")


class IncompatibleComputations(RGCheckError):
    """Two computations cannot be composed."""

    kind = "incompatible"

    def __init__(self, index: int, reason: str):
        self.index = index
        super().__init__(f"computations incompatible at index {index}: {reason}")


class BudgetExceeded(RGCheckError):
    """The configuration budget ran out before exploration finished."""

    kind = "budget"

    def __init__(self, budget: int, statistics: Optional[Dict[str, int]] = None):
        self.budget = budget
        self.statistics = dict(statistics or {})
        super().__init__(f"state-space budget of {budget} configurations exceeded")


INPUT_ERRORS = (
    SourceSyntaxError,
    ValidationError,
    EvaluationError,
    SpecificationError,
    StructureError,
    SchemaError,
    IncompatibleComputations,
)
