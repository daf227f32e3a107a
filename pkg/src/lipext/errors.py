"""Exception types raised across the package."""


class LipextError(ValueError):
    """Base class. ``witness`` carries offending indices when there are any."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class MetricViolation(LipextError):
    pass


class DuplicatePoint(LipextError):
    pass


class Disconnected(LipextError):
    pass


class NonpositiveWeight(LipextError):
    pass


class EmptySet(LipextError):
    pass


EmptySubset = EmptySet


class PointNotInSet(LipextError):
    pass


class NonpositiveParameter(LipextError):
    pass


class ConstantFunctionShortcut(LipextError):
    """Raised when a scale sequence is requested for L = 0.

    Callers should take the constant-extension path instead.
    """


class NegativeArgument(LipextError):
    pass


class CoincidentPoints(LipextError):
    pass


class BadSpec(LipextError):
    pass


class InstanceMismatch(LipextError):
    pass


class VariantMismatch(LipextError):
    pass
