"""Exception types raised across the package."""


class ZygmundError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ZygmundError, ValueError):
    """A function was evaluated outside of its domain."""


class DuplicateNodeError(ZygmundError, ValueError):
    pass


class ZeroStepError(ZygmundError, ValueError):
    pass


class UnsupportedOrderError(ZygmundError, ValueError):
    pass


class MissingDerivativeError(ZygmundError, LookupError):
    """An exact derivative of the requested order is not available."""


class ParameterRangeError(ZygmundError, ValueError):
    pass


class MissingStencilError(ZygmundError, LookupError):
    pass


class EmptyAdmissibleSetError(ZygmundError, ValueError):
    """No (x, h) pair on the grid satisfies the admissibility constraints."""


class InsufficientScalesError(ZygmundError, ValueError):
    pass


class OverlappingWindowError(ZygmundError, ValueError):
    pass


class SegmentLeavesDomainError(ZygmundError, ValueError):
    pass


class NormalizationError(ZygmundError, ValueError):
    pass


class BudgetError(ZygmundError, ValueError):
    """Derivative budget of a function is too small for the requested order."""


class SpecParseError(ZygmundError, ValueError):
    """Malformed function spec string.

    Carries the offending token and its character offset so the CLI can point
    at it.
    """

    def __init__(self, message, text="", position=0, token=""):
        self.text = text
        self.position = position
        self.token = token
        where = f" at position {position}" if text else ""
        tok = f" (token {token!r})" if token else ""
        super().__init__(f"{message}{where}{tok}")
