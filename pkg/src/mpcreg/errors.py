"""Exception hierarchy for the mpcreg package.

``MpcRegError`` is the common base. ``DataFormatError`` signals malformed
input files; everything under ``NumericalBreakdownError`` signals that a
protocol or formula hit a numerically degenerate state.
"""


class MpcRegError(Exception):
    """Base class for all mpcreg errors."""


class InvalidPolicyError(MpcRegError):
    """Sharing policy violates its invariants (n, t, alphas)."""


class InvalidSubsetError(MpcRegError):
    """A basis subset has the wrong size or duplicate party indices."""


class DegenerateBasisError(MpcRegError):
    """Interpolation nodes coincide; no Lagrange basis exists."""


class InsufficientSharesError(MpcRegError):
    """Fewer than t+1 usable shares were supplied for reconstruction."""


class IncompatibleSharingError(MpcRegError):
    """Operands of a share-level operation carry different policies."""


class ShapeMismatchError(MpcRegError):
    """Shared matrix/vector shapes are not conformable."""


class NotPositiveDefiniteError(MpcRegError):
    """A matrix required to be symmetric positive definite is not."""


class NumericalBreakdownError(MpcRegError):
    """A protocol or formula reached a numerically degenerate state."""


class NearSingularMaskError(NumericalBreakdownError):
    """An opened masked value was too close to zero to divide by."""


class SingularMatrixError(NumericalBreakdownError):
    """A plaintext matrix turned out numerically singular during inversion."""


class SingularMaskMatrixError(NumericalBreakdownError):
    """The opened mask product R*A stayed singular across all retries."""


class DegeneratePivotError(NumericalBreakdownError):
    """Secure elimination met an effectively zero pivot."""


class ZeroPivotError(NumericalBreakdownError):
    """Plaintext pivoting-free elimination met a zero pivot (non-SPD input)."""


class InvalidScenarioError(NumericalBreakdownError):
    """Leakage scenario parameters are outside the bound's domain."""


class DataFormatError(MpcRegError):
    """A data file could not be parsed; the message points at the row."""
