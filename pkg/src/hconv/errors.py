"""Exception types raised across the package."""


class HconvError(Exception):
    """Base class for every error raised by hconv."""


class ConstantTermTooSmall(HconvError, ZeroDivisionError):
    pass


class RadiusExceeded(HconvError, ValueError):
    pass


class DivergentTail(HconvError, ArithmeticError):
    pass


class DilatationNotBounded(HconvError, ValueError):
    pass


class NotNormalized(HconvError, ValueError):
    pass


class NotNormalizedConvolver(NotNormalized):
    pass


class ParamOutOfRange(HconvError, ValueError):
    pass


class DegenerateProjection(HconvError, ValueError):
    pass


class _WitnessError(HconvError, ZeroDivisionError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DenominatorVanishes(_WitnessError):
    pass


class DerivativeVanishes(_WitnessError):
    pass


class ExpressionError(HconvError, ValueError):
    """Parse or evaluation failure in a CLI expression; ``position`` is a 0-based offset."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class EvaluationFailed(_WitnessError, ArithmeticError):
    """An evaluator produced a non-finite value at ``witness``."""
