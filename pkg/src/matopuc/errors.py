"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): bad numerical
input (``NumericalError``) and a violated mathematical identity
(``IdentityViolation``).
"""


class OpucError(Exception):
    """Base class for all errors raised by matopuc."""


class NumericalError(OpucError, ValueError):
    """Input is numerically unusable (singular, indefinite, too coarse...)."""


class NotHermitianError(NumericalError):
    pass


class NotPositiveDefiniteError(NumericalError):
    def __init__(self, message, smallest_eigenvalue=None):
        super().__init__(message)
        self.smallest_eigenvalue = smallest_eigenvalue


class NotContractionError(NumericalError):
    pass


class GridTooCoarseError(NumericalError):
    pass


class DivergentSzegoIntegral(NumericalError):
    """log det W is not integrable on the grid (W singular somewhere)."""


class IdentityViolation(OpucError):
    """A checked identity failed beyond tolerance.

    ``name`` identifies the identity; ``lhs`` and ``rhs`` carry the two
    values that were compared so the caller can inspect the drift.
    """

    def __init__(self, name, residual, tol, lhs=None, rhs=None):
        super().__init__(f"{name}: residual {residual:.3e} exceeds tolerance {tol:.1e}")
        self.name = name
        self.residual = residual
        self.tol = tol
        self.lhs = lhs
        self.rhs = rhs
