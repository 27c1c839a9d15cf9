"""Exception hierarchy.

Every error optionally carries the grid node ``(i, j)`` where the problem was
detected so that callers (and the CLI) can name it.
"""


class MxRError(Exception):
    def __init__(self, message, node=None):
        if node is not None:
            message = f"{message} (node {tuple(int(k) for k in node)})"
        super().__init__(message)
        self.node = None if node is None else tuple(int(k) for k in node)


class StructuralError(MxRError, ValueError):
    """Array shapes or dimensions do not match."""


class DomainError(MxRError, ValueError):
    """Input outside the domain of an operation (degenerate metric, null vector, ...)."""


class ValidationError(MxRError, ValueError):
    """Data violates a stated constraint (e.g. a chart leaving the model)."""


class PreconditionError(MxRError, ValueError):
    pass


class NumericalError(MxRError, ArithmeticError):
    pass


class IntegrabilityError(MxRError):
    """Connection not flat enough for frame transport."""


class IntegrityError(MxRError):
    """Reconstructed output drifted off the model beyond the allowed displacement."""


class HypothesisError(MxRError, ValueError):
    """A hypothesis of a theorem (minimality, harmonicity, ...) fails."""


class ConsistencyError(MxRError):
    """Two independent routes to the same quantity disagree."""


class StepSizeError(MxRError):
    pass


class UnsupportedError(MxRError, NotImplementedError):
    pass
