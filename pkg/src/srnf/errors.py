"""Exception types shared across the package."""


class SrnfError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(SrnfError):
    pass


class DegreeOutOfRange(SrnfError):
    pass


class DegreeMismatch(SrnfError):
    """Monomial order comparison between different degrees or dimensions."""


class SingularLinearPart(SrnfError):
    pass


class SingularMatrix(SrnfError):
    pass


class NonConvergence(SrnfError):
    """Eigenvalue iteration failed to triangularize the input matrix."""


class NoConvergence(SrnfError):
    """Straightening iteration did not stabilize within the iteration cap."""

    def __init__(self, message, last_gap=None, iterations=None):
        super().__init__(message)
        self.last_gap = last_gap
        self.iterations = iterations


class NotContracting(SrnfError):
    pass


class NotTriangular(SrnfError):
    pass


class CertificationFailure(SrnfError):
    """A map that must be sub-resonant by theory failed certification.

    Signals an implementation defect or inconsistent tolerances, never an
    expected runtime condition.
    """

    def __init__(self, message, offenders=()):
        super().__init__(message)
        self.offenders = tuple(offenders)


class IllConditionedResonance(SrnfError):
    """A divisor is resonantly small at a position that is not sub-resonant.

    Indicates that the resonance tolerance and the log-space sub-resonance
    tolerance are inconsistent for the supplied spectrum.
    """


class SpectrumMismatch(SrnfError):
    pass


class ValidationError(SrnfError):
    """Invalid input document or configuration."""
