"""Exception types shared across the engine."""


class WorkbenchError(Exception):
    """Base class for all engine errors."""


class SignatureMismatch(WorkbenchError):
    """Structures with different signatures were combined."""


class MissingIsoData(WorkbenchError):
    """Skeletonization needs attached structures or explicit isomorphism data."""


class ShapeMismatch(WorkbenchError):
    """Sequences or transformations with incompatible shapes were combined."""


class TruncationOverflow(WorkbenchError):
    """A level map points outside the truncated index range."""


class TrivialColoring(WorkbenchError):
    """A coloring with fewer than two colors where at least two are required."""


class ArrowDoesNotHold(WorkbenchError):
    """A construction required an arrow instance that fails."""


class FactorSearchFailed(WorkbenchError):
    """No factorization witness exists; signals a violated precondition."""


class BudgetExceeded(WorkbenchError):
    """An exhaustive enumeration would exceed the configured budget."""


class ExpansionOverflow(WorkbenchError):
    """A coloring-family fiber is larger than the configured budget."""


class CorruptCertificate(WorkbenchError):
    """A replayed certificate is malformed or fails re-verification."""
