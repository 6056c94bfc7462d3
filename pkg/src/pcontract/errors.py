"""Exception hierarchy shared by every module."""


class PiecewiseContractionError(Exception):
    """Base class for all errors raised by this package."""


class OutOfDomain(PiecewiseContractionError, ValueError):
    pass


class InvalidMap(PiecewiseContractionError, ValueError):
    """Raised when a map fails validation; carries the report."""

    def __init__(self, report):
        self.report = report
        kinds = ", ".join(v.kind for v in report.violations)
        super().__init__(f"map failed validation: {kinds}")


class ArithmeticBudgetExceeded(PiecewiseContractionError):
    """An exact quantity outgrew the caller's bit-size or step budget."""


class PreconditionFailed(PiecewiseContractionError, ValueError):
    pass


class DegenerateOwner(PiecewiseContractionError):
    """A degenerate periodic point admits no trapping interval."""


class LayerHitBreakpoint(PiecewiseContractionError):
    pass


class BetaHitNotFound(PiecewiseContractionError):
    pass


class ResolutionExceeded(PiecewiseContractionError):
    pass


class EmptyChain(PiecewiseContractionError, ValueError):
    pass


class BudgetExceeded(PiecewiseContractionError):
    pass


class NotInward(PiecewiseContractionError, ValueError):
    pass


class CornerHit(PiecewiseContractionError):
    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class NonInjective(PiecewiseContractionError):
    pass


class IncommensurableEdges(PiecewiseContractionError, ValueError):
    pass


class GenerationFailed(PiecewiseContractionError):
    pass


class UnknownKind(PiecewiseContractionError, ValueError):
    pass


class SpecError(PiecewiseContractionError, ValueError):
    """Malformed map or scene file; ``location`` names the offending field."""

    def __init__(self, message, location=None):
        self.location = location
        prefix = f"{location}: " if location else ""
        super().__init__(prefix + message)
