"""Exception hierarchy shared by all modules."""


class ConicMinError(Exception):
    """Base class for errors raised by conicmin."""


class SingularMatrixError(ConicMinError):
    pass


class DegenerateError(ConicMinError):
    pass


class ZeroDirectionError(ConicMinError):
    pass


class NonpositiveFactorError(ConicMinError):
    pass


class NegativeWeightError(ConicMinError):
    pass


class ShapeMismatchError(ConicMinError):
    pass


class IterationCapError(ConicMinError):
    """The pyramid walk ran far past its proven bound; the oracle is not conic."""


class ShrinkViolationError(ConicMinError):
    """A covering ellipsoid missed the volume budget for the current c_hat."""


class EmptyFamilyError(ConicMinError):
    pass


class UnsupportedDimensionError(ConicMinError):
    pass


class TooLargeError(ConicMinError):
    pass


class ParseError(ConicMinError):
    pass


class InvariantViolation(ConicMinError):
    """An internal consistency check failed."""
