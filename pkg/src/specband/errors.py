"""Exception hierarchy shared by all specband modules."""


class SpecbandError(Exception):
    """Base class for every error raised by this package."""


class MissingPivot(SpecbandError):
    """A column beyond the boundary order has no designated pivot row."""


class PivotViolation(SpecbandError):
    """A designated pivot entry is zero, not rightmost, or structurally unusable."""


class TailUndefined(SpecbandError):
    """Extension beyond the stored size was requested but no tail is declared."""


class InconsistentProfile(SpecbandError):
    """A random-generation profile contradicts itself."""


class DimensionMismatch(SpecbandError):
    """Vector polynomials or measures of different dimension were combined."""


class NumericalFailure(SpecbandError):
    """A numerical routine produced a result outside its guaranteed tolerance."""


class SingularBoundary(SpecbandError):
    """The boundary matrix is not invertible."""


class SingularZerothMoment(SpecbandError):
    """The zeroth moment of a step measure is singular; orthonormalization cannot start."""


class NoDecomposition(SpecbandError):
    """No decomposition over the orthonormal/degenerate system within tolerance.

    Carries the achieved least-squares residual so the caller can inspect
    how far away the best candidate was.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class StageError(SpecbandError):
    """Wraps an error raised inside a pipeline stage, tagged with the stage name."""

    def __init__(self, stage, original):
        super().__init__(f"stage '{stage}': {original}")
        self.stage = stage
        self.original = original
