"""Exception hierarchy shared by all modules."""


class StarFrameError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(StarFrameError, ValueError):
    """Operands do not conform (algebra shape, module rank, or block size)."""


class NotInvertible(StarFrameError, ArithmeticError):
    def __init__(self, message, factor=None, sigma_min=None):
        super().__init__(message)
        self.factor = factor
        self.sigma_min = sigma_min


class NotPositive(StarFrameError, ArithmeticError):
    pass


class PatternError(StarFrameError, ValueError):
    """A flat matrix cannot be read back as an operator over the given shape."""


class NoLowerBound(StarFrameError, ArithmeticError):
    """The frame operator is singular in some factor."""


class MalformedBounds(StarFrameError, ValueError):
    pass


class NotInjective(StarFrameError, ArithmeticError):
    pass


class NotSurjective(StarFrameError, ArithmeticError):
    pass
