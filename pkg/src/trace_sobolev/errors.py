"""Exception hierarchy shared by every module."""


class TraceSobolevError(Exception):
    """Base class for all library errors."""


class DomainError(TraceSobolevError, ValueError):
    """An argument lies outside the admissible range."""


class ModeError(TraceSobolevError):
    """Operation not defined for the current exponent mode (p = 1 or p != 2)."""


class NumericalFailure(TraceSobolevError):
    """Base class for failures of a numerical procedure."""


class QuadratureFailure(NumericalFailure):
    pass


class EnvelopeViolation(NumericalFailure):
    """Sampled integrand exceeds its declared power-law tail envelope."""


class RootBracketFailure(NumericalFailure):
    pass


class CrossCheckFailure(NumericalFailure):
    pass


class MassMismatch(NumericalFailure):
    pass


class MonotonicityFailure(NumericalFailure):
    pass


class NormalizationFailure(NumericalFailure):
    pass


class AmbiguousClassification(NumericalFailure):
    pass


class Violation(TraceSobolevError):
    """A mathematical property failed to hold numerically."""


class InvarianceViolation(Violation):
    pass


class PropertyViolation(Violation):
    pass


class InequalityViolation(Violation):
    pass


class ConstancyViolation(Violation):
    pass


class SignViolation(Violation):
    pass


class ChainViolation(Violation):
    pass
