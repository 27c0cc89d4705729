"""Exception types raised by gaussclone."""


class GaussCloneError(Exception):
    """Base class for all library errors."""


class RangeError(GaussCloneError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class DimensionError(GaussCloneError, ValueError):
    """Mode counts or matrix shapes do not match."""


class ShapeError(GaussCloneError, ValueError):
    """An input matrix lacks the structure a closed form requires."""


class SingularMatrixError(GaussCloneError, ArithmeticError):
    """A covariance block that must be inverted is (numerically) singular."""


class PhysicalityError(GaussCloneError, ValueError):
    """A covariance matrix violates the uncertainty relation."""


class TruncationError(GaussCloneError, ArithmeticError):
    """A Fock-space object lost too much weight to the cutoff."""


class BudgetError(GaussCloneError, RuntimeError):
    """The requested accuracy cannot be met within the evaluation budget."""


class ParseError(GaussCloneError, ValueError):
    """A command-line state or gain spec could not be parsed."""

    def __init__(self, token, reason=""):
        self.token = token
        msg = f"cannot parse {token!r}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
