"""Exception hierarchy.

Numerical failures (the map or the state degenerates) derive from
:class:`NumericalFailure`; malformed inputs derive from ``ValueError`` so the
CLI can tell the two apart.
"""


class QPurifyError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(QPurifyError, ValueError):
    pass


class InvariantViolation(QPurifyError, ValueError):
    pass


class NumericalFailure(QPurifyError, ArithmeticError):
    pass


class NullMap(NumericalFailure):
    """The conditional map is numerically zero."""


class DefectiveMap(NumericalFailure):
    """Repeated eigenvalue with a one-dimensional eigenspace."""


class NonExtractive(NumericalFailure):
    """Eigenvalues of equal modulus: no state is singled out (g = 1)."""


class StateAnnihilated(NumericalFailure):
    """The measurement record has (numerically) zero probability.

    ``partial`` carries the trajectory computed up to the failing step,
    when raised from :func:`qpurify.core.trajectory`.
    """

    def __init__(self, message, step=None, partial=None):
        super().__init__(message)
        self.step = step
        self.partial = partial


class DegenerateDenominator(NumericalFailure):
    pass


class InvalidK(QPurifyError, ValueError):
    pass


class UndefinedThreshold(QPurifyError, ValueError):
    pass


class DegenerateTau(QPurifyError, ValueError):
    """|cos(eps*tau)| is 0 or 1, outside the open interval the threshold needs."""
