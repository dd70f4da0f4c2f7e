"""Exception types raised by exptrop."""


class ExpTropError(Exception):
    """Base class for all library errors."""


class InvalidInputError(ExpTropError, ValueError):
    """Malformed or out-of-contract input (CLI exit status 2)."""


class DegenerateError(InvalidInputError):
    """Colliding frequencies, degenerate slices, singular transforms."""


class NumericalError(ExpTropError, ArithmeticError):
    """A numerical routine could not certify its answer (CLI exit status 3)."""


class EvaluationOverflow(NumericalError):
    pass


class LPError(NumericalError):
    pass


class RootOnBoundaryError(NumericalError):
    pass


class QuadratureError(NumericalError):
    pass


class ProjectionSamplingError(NumericalError):
    pass
