"""
Exceptions raised by the TEiCP numerical core.

Every error is also a ValueError so callers that only care about bad input
can catch the builtin.
"""


class TEiCPError(ValueError):
    """Base class for all solver-suite errors."""


class DimensionMismatchError(TEiCPError):
    """A vector or index set does not fit the operator's dimension."""


class SymmetryError(TEiCPError):
    """A tensor that must be symmetric is not."""


class SingularDenominatorError(TEiCPError):
    """Bx^m vanished where a Rayleigh quotient needs it."""


class MeritDomainError(TEiCPError):
    """The logarithmic merit was evaluated where Ax^m or Bx^m is not positive."""

    def __init__(self, tensor_name, value):
        self.tensor_name = tensor_name
        self.value = value
        super().__init__(
            f"logarithmic merit needs {tensor_name}x^m > 0, got {value!r}"
        )


class ScalingError(TEiCPError):
    """B-normalization failed because Bu^m <= 0."""


class AsymmetricMatrixError(TEiCPError):
    """A matrix handed to the symmetric eigensolver is not symmetric."""


class InvalidProblemError(TEiCPError):
    """A problem or solver identifier could not be resolved."""


class TensorFormatError(TEiCPError):
    """A tensor JSON document is malformed."""


class SolverConfigError(TEiCPError):
    """A SolverConfig violates its invariants."""


class ExperimentConfigError(TEiCPError):
    """Experiment options are inconsistent (bad runs, x0 length, output format)."""


class OperatorDomainError(TEiCPError):
    """An operator was evaluated where it is undefined."""
