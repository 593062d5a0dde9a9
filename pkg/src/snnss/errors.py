"""Exception types shared across the package."""


class SnnssError(Exception):
    """Base class for all package errors."""


class GraphError(SnnssError, ValueError):
    """Graph construction or validation failed."""


class EdgeListParseError(GraphError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class RegularityError(GraphError):
    def __init__(self, message: str, vertex: int):
        super().__init__(message)
        self.vertex = vertex


class DomainError(SnnssError, ValueError):
    """Parameters outside the admissible range of an operation."""


class ResourceLimitError(SnnssError):
    """Request exceeds a hard implementation bound (state space, order)."""


class NonErgodicError(SnnssError):
    """Operation requires an irreducible chain or a positive relaxation rate."""


class FitDegenerateError(SnnssError):
    """Closure fit cannot be resolved on the given sample."""


class DegenerateSpectrumError(SnnssError):
    """Coincident decay rates; the two-exponential form is invalid."""
