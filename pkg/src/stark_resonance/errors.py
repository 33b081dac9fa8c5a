"""Exception hierarchy.

Everything numerical derives from :class:`StarkError`; the CLI maps it to
exit status 1. Invalid inputs additionally derive from :class:`ValueError`.
"""


class StarkError(Exception):
    """Base class for numerical failures raised by this package."""


class AiryRangeError(StarkError, OverflowError):
    """An Airy value (or kernel product) would overflow double precision."""


class InvalidParameters(StarkError, ValueError):
    pass


class PoleError(StarkError):
    """The Krein determinant vanishes at the requested energy."""


class ConvergenceError(StarkError):
    pass


class UpperHalfPlaneError(ConvergenceError):
    """Root search ended at Im z > 0; the seed was outside the resonance window."""


class DegenerateRootError(StarkError):
    """D'(E) is numerically zero, i.e. E is (close to) a double zero."""


class CoincidentRootsError(StarkError):
    pass


class ContourError(StarkError):
    """The counting contour passes through (or too close to) a zero."""


class NoBarrierError(StarkError, ValueError):
    pass


class InconclusiveError(StarkError):
    pass


class NoSignChangeError(StarkError):
    pass


class QuadratureError(StarkError):
    pass


class WindowTooShortError(StarkError, ValueError):
    pass
