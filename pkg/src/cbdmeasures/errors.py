"""Exception types raised by cbdmeasures."""


class CbdError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSystem(CbdError, ValueError):
    """A system description violates a structural or probabilistic invariant."""


class NegativeProbability(InvalidSystem):
    pass


class PmfNotNormalized(InvalidSystem):
    pass


class UnknownContent(InvalidSystem, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownContext(InvalidSystem, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class EmptyContext(InvalidSystem):
    pass


class UnmeasuredContent(InvalidSystem):
    pass


class DuplicateIdentifier(InvalidSystem):
    pass


class InvalidPattern(InvalidSystem):
    """An outcome bitstring has the wrong length or characters other than 0/1."""


class SubsetNotInContext(CbdError, ValueError):
    pass


class ContextDoesNotMeasureContent(CbdError, ValueError):
    pass


class SystemTooLarge(CbdError):
    """The number of variables exceeds the dense-matrix cap."""


class SystemIsContextual(CbdError):
    """A noncontextuality measure was requested for a contextual system."""


class MeasureUndefined(CbdError):
    """The requested measure has no value for this system format."""


class InfeasibleBunches(CbdError):
    """The bunch constraints admit no coupling; indicates an internal error."""


class InvalidExpectations(CbdError, ValueError):
    """Cyclic expectations induce a bunch distribution with a negative entry."""


class DimensionMismatch(CbdError, ValueError):
    pass


class NumericBreakdown(CbdError, ArithmeticError):
    """Float simplex lost precision; retry in rational mode."""


class OracleTooSlow(CbdError):
    """Support enumeration exceeded its combination budget."""


class ParseError(CbdError, ValueError):
    """A system file could not be parsed; carries the offending line or key."""

    def __init__(self, message, *, line=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.key = key
