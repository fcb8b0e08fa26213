"""Exception hierarchy for the ultracalc package."""


class UltracalcError(Exception):
    """Base class for all package errors."""


class PrimeMismatch(UltracalcError):
    """Operands live over different primes."""


class BackendMismatch(UltracalcError):
    """Operands use different scalar backends."""


class DivisionByZero(UltracalcError):
    """Division by an exact zero."""


class PrecisionExhausted(UltracalcError):
    """A truncated-digit computation ran out of absolute precision.

    Raised instead of silently rounding; callers that can tolerate the
    loss must catch it and report an indeterminate result.
    """


class DomainError(UltracalcError):
    """A function was evaluated outside its declared domain."""


class DimensionMismatch(UltracalcError):
    """Vector or function dimensions are inconsistent."""


class ZeroIncrement(UltracalcError):
    """A difference quotient was requested with a zero increment.

    The recursive evaluator cannot divide by zero; use a closed form or
    a limit probe for the continuous extension instead.
    """


class UnsupportedOrder(UltracalcError):
    """The requested order is outside the implemented closed-form range."""


class IndeterminateRank(UltracalcError):
    """Rank computation could not certify pivots at working precision."""


class ConfigError(UltracalcError):
    """A run configuration failed validation."""
