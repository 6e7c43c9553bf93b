"""Exception hierarchy shared by the library and the CLI."""


class BeauvilleError(Exception):
    """Base class for every error raised on purpose by this package."""


class NonPrimeCharacteristic(BeauvilleError, ValueError):
    pass


class FieldOverflow(BeauvilleError, OverflowError):
    pass


class ZeroElement(BeauvilleError, ZeroDivisionError):
    pass


class DegreeTooLarge(BeauvilleError, ValueError):
    pass


class CapExceeded(BeauvilleError):
    """A closure grew past its cap; the subgroup is larger, nothing is wrong."""

    def __init__(self, cap: int):
        super().__init__(f"closure exceeded {cap} elements")
        self.cap = cap


class TooLarge(BeauvilleError):
    """The group is too large for the requested exact computation."""


class BudgetExhausted(BeauvilleError):
    """A randomized search ran out of budget; this proves nothing."""


class NonIntegralGenus(BeauvilleError, ValueError):
    pass


class NonIntegralChi(BeauvilleError, ValueError):
    pass


class GenusBelowTwo(BeauvilleError, ValueError):
    pass


class BadType(BeauvilleError, ValueError):
    def __init__(self, message: str, code: str = "bad-type"):
        super().__init__(message)
        self.code = code


class DegreeTooSmall(BeauvilleError, ValueError):
    pass


class UnsupportedQ(BeauvilleError, ValueError):
    pass


class UnsupportedP(BeauvilleError, ValueError):
    pass


class BadInput(BeauvilleError, ValueError):
    pass


class NoneFound(BeauvilleError):
    pass


class InternalInvariantError(BeauvilleError, AssertionError):
    """A mathematical guarantee failed to hold; this is a bug."""
