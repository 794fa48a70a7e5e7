"""Exception types shared across the package."""

from __future__ import annotations


class SphadjError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SphadjError, ValueError):
    """Shapes of matrices, complexes or maps do not fit together."""


class ModulusMismatch(SphadjError, ValueError):
    """Two objects over different prime fields were combined."""


class InvalidStructure(SphadjError, ValueError):
    """A construction violates one of its defining identities (d^2 = 0, naturality, ...)."""


class ResourceRefusal(SphadjError):
    """Requested parameters exceed a configured enumeration or size bound."""


class UnsupportedScenario(SphadjError):
    """The operation is not defined for the given input (e.g. a non-sphere base)."""


class DocumentError(SphadjError, ValueError):
    """An input document is malformed."""


class AlgebraValidationError(InvalidStructure):
    """Structure constants violate degree, associativity or unit identities.

    ``violations`` holds one dict per failed identity, naming the law and the
    basis indices that witness the failure.
    """

    def __init__(self, violations: list[dict]):
        self.violations = violations
        first = violations[0] if violations else {}
        super().__init__(f"{len(violations)} violated identities, first: {first}")
