"""Exception hierarchy shared by every MATS module."""

from __future__ import annotations


class MatsError(Exception):
    """Base class for all library errors."""


class NotMonotone(MatsError, ValueError):
    """A map expected to be strictly increasing is not."""


class DimensionMismatch(MatsError, ValueError):
    pass


class EmptyFunction(MatsError, ValueError):
    pass


class PieceMismatch(MatsError, ValueError):
    """Two monotone pieces cannot be rearranged onto each other."""


class SignatureMismatch(MatsError, ValueError):
    pass


class NonMonotoneResult(MatsError, ValueError):
    """A constructed transport map came out non-increasing somewhere."""


class RankDeficient(MatsError, ValueError):
    pass


class DegenerateBasis(MatsError, ValueError):
    pass


class AssumptionViolated(MatsError, ValueError):
    pass


class SchemaMismatch(MatsError, ValueError):
    pass


class CflViolation(MatsError, RuntimeError):
    def __init__(self, max_speed: float, lam: float) -> None:
        self.max_speed = max_speed
        self.lam = lam
        super().__init__(
            f"CFL violated: lambda * max|f_u| = {lam:.4g} * {max_speed:.4g} "
            f"= {lam * max_speed:.4g} > 1"
        )


class SingularSystem(MatsError, RuntimeError):
    pass


class SmallGradient(MatsError, RuntimeError):
    pass


class SignatureViolation(MatsError, RuntimeError):
    """The global snapshot set fails the signature condition."""


class BundleIOError(MatsError, OSError):
    pass
