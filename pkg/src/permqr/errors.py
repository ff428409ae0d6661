"""Exception hierarchy shared by every permqr module."""


class PermQRError(Exception):
    """Base class for all errors raised by permqr."""


class InvalidMatrix(PermQRError, ValueError):
    """Input is not square, not finite, or not symmetric."""


class OrderMismatch(PermQRError, ValueError):
    pass


class LengthMismatch(PermQRError, ValueError):
    pass


class RankDeficient(PermQRError, ArithmeticError):
    """A diagonal entry of R fell below the rank tolerance."""


class NotPositiveDefinite(PermQRError, ArithmeticError):
    """A Cholesky pivot was not strictly positive."""


class NoConvergence(PermQRError, ArithmeticError):
    pass


class OrderTooLarge(PermQRError, ValueError):
    """Exhaustive permutation search requested for too large an order."""


class MissingTruth(PermQRError, ValueError):
    """A strategy needing ground-truth eigenvalues was called without them."""


class GenerationExhausted(PermQRError, RuntimeError):
    """Too many consecutive random draws were rejected."""
