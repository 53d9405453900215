"""Exception hierarchy shared across the package."""


class TransitError(Exception):
    """Base class for all library errors."""


class CycleDetected(TransitError):
    """Transitive closure of the input relation violates irreflexivity."""


class DegreeNotConcentrated(TransitError):
    """An element's graded space is nonzero in more than one degree."""


class NotABoundary(TransitError):
    """A candidate differential does not square to zero."""


class NotChainMap(TransitError):
    """A map does not intertwine the differentials."""


class ShapeMismatch(TransitError):
    """Matrix or block shapes are inconsistent with the declared spaces."""


class ExactnessFailure(TransitError):
    """A long exact sequence failed an image = kernel check."""


class MissingInterval(TransitError):
    """A braid morphism lacks a component for some interval."""


class SearchBudgetExceeded(TransitError):
    """An exhaustive search hit its candidate budget."""

    def __init__(self, message: str, budget: int):
        super().__init__(f"{message} (budget {budget})")
        self.budget = budget


class NonTrivialConnection(TransitError):
    """An operation requiring zero boundary maps received a nonzero one."""


class UniquenessViolated(TransitError):
    """Enumeration found a different number of solutions than guaranteed."""


class IncompatibleBlock(TransitError):
    """A block assembly fails the square-zero compatibility equation."""

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularDiagonalBlock(TransitError):
    """A diagonal block required to be invertible is singular."""


class PropertyFailure(TransitError):
    """A certified property clause failed verification."""

    def __init__(self, clause: str, message: str):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


class UnverifiedMorphism(TransitError):
    """A morphism handed in as verified failed its own verification."""


class SchemaError(TransitError):
    """A problem file violates the JSON schema."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer


class NotValid(TransitError):
    """A composite object failed its validity checks."""
