"""Exception hierarchy shared by all modules."""


class ModWignerError(Exception):
    """Base class for every error raised by the package."""


class ShapeMismatch(ModWignerError, ValueError):
    pass


class NotHermitian(ModWignerError, ValueError):
    pass


class NotPSD(ModWignerError, ValueError):
    pass


class ZeroVector(ModWignerError, ValueError):
    pass


class HypothesisViolated(ModWignerError, ValueError):
    """The rank-one sum identity required for factor extraction does not hold."""


class NotJordan(ModWignerError):
    """A linear map is neither a *-homomorphism nor a *-antihomomorphism."""


class NoAnchor(ModWignerError):
    """No vectors y, z with <phi(y y*) z, z> = 1 were found."""


class SizeLimit(ModWignerError, ValueError):
    pass


class NotIsometry(ModWignerError, ValueError):
    pass


class OracleMiss(ModWignerError, KeyError):
    """A table oracle was queried outside its domain."""

    def __str__(self):
        return Exception.__str__(self)


class HypothesisFailed(ModWignerError):
    """The map does not preserve |[.,.]| on some probe.

    ``witness`` carries whatever identified the violation (probe index,
    element, or deviation), so callers can report it.
    """

    def __init__(self, message, witness=None, deviation=None):
        super().__init__(message)
        self.witness = witness
        self.deviation = deviation


class InconsistentMeasure(HypothesisFailed):
    """The projection data admits no linear extension within tolerance."""


class DimensionOne(ModWignerError, ValueError):
    """The coefficient algebra is commutative (d = 1); no recovery is attempted."""
