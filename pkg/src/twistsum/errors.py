"""Exception types shared across the package."""


class TwistSumError(Exception):
    """Base class for all package errors."""


class NonInvertible(TwistSumError, ValueError):
    pass


class NotCoprime(TwistSumError, ValueError):
    pass


class UndefinedForZero(TwistSumError, ValueError):
    pass


class NotPrimitive(TwistSumError, ValueError):
    pass


class PreconditionViolated(TwistSumError, ValueError):
    pass


class NonInvertibleInnerTerm(TwistSumError, ArithmeticError):
    """An inner inverse in the closed form for the E-sum does not exist."""


class MissingPrime(TwistSumError, KeyError):
    pass


class OutOfRange(TwistSumError, ValueError):
    pass


class CoefficientTableTooShort(TwistSumError, ValueError):
    pass


class TableValidationError(TwistSumError, ValueError):
    pass


class OrderTooLarge(TwistSumError, ValueError):
    pass


class BudgetExceeded(TwistSumError, RuntimeError):
    pass


class DerivativeBoundViolated(TwistSumError, ValueError):
    pass


class PhaseOracleMismatch(TwistSumError, ValueError):
    pass


class BelowCalibratedRange(TwistSumError, ValueError):
    pass


class ParamsViolated(TwistSumError, ValueError):
    pass


class RangeGateFailed(TwistSumError, ValueError):
    pass


class TruncationNotReached(TwistSumError, RuntimeError):
    pass


class ConfigError(TwistSumError, ValueError):
    pass
