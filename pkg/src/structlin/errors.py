"""Exception types shared across the package."""


class StructlinError(Exception):
    """Base class for all errors raised by structlin."""


class MalformedInputError(StructlinError, ValueError):
    """Input has the wrong shape or contains non-finite entries."""


class NumericFailureError(StructlinError, ArithmeticError):
    """A numerical routine failed; ``residual`` carries the offending size."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InvalidStructureError(StructlinError, ValueError):
    """A structure map is singular or does not define an order-two map."""


class IncompatibleStructuresError(StructlinError, ValueError):
    """Generators of an EigenspaceSpec do not commute."""


class IllConditionedSpectrumError(NumericFailureError):
    """Eigenvalue clusters are too close to be separated reliably."""


class InvalidBlockError(StructlinError, ValueError):
    """An invariant block violates a structural assumption."""


class ClassificationError(StructlinError):
    """No normal form row matches a reduced block."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
