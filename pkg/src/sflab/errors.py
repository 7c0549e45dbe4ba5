"""Exception hierarchy shared across the package.

Everything numerical that can fail raises a subclass of SFLabError, so the
command line layer can map any domain failure to a single exit code while
tests can still pin down the precise cause.
"""


class SFLabError(Exception):
    """Base class for all failures raised by this package."""


class PolynomialError(SFLabError):
    """Invalid polynomial input (zero polynomial where one is required,
    declared degree not matching the actual leading coefficient)."""


class NormalizationError(SFLabError):
    """Input cannot be brought to the normalized integral form."""


class QuadratureError(SFLabError):
    """Adaptive integration failed to converge within the panel budget.

    Carries the partial estimate and its error bound so callers can decide
    whether the partial answer is still usable.
    """

    def __init__(self, message, partial=None, error_log=None):
        super().__init__(message)
        self.partial = partial
        self.error_log = error_log


class RootFindingError(SFLabError):
    """Simultaneous root iteration failed to converge."""


class OverflowGuardError(SFLabError):
    """A value left the representable range and the caller asked for a hard
    failure instead of a silent infinity."""


class FixedPointError(SFLabError):
    """A point claimed to be fixed does not satisfy the fixed point residual
    bound."""


class ResonanceError(SFLabError):
    """The multiplier is a root of unity: the linearizing recursion hits an
    exactly vanishing divisor. Names the first failing order."""

    def __init__(self, message, order=None):
        super().__init__(message)
        self.order = order


class SeriesDivergenceError(SFLabError):
    """A truncated series was summed outside its disk of convergence."""


class FamilyKindError(SFLabError):
    """Perturbation family kind incompatible with the base function type."""


class PrecisionError(SFLabError):
    """Requested precision not deliverable by the chosen representation."""
