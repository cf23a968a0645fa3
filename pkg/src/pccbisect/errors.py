"""Exception hierarchy shared by every module."""


class PccError(Exception):
    """Base class for all library errors."""


class OddN(PccError, ValueError):
    pass


class OutOfRange(PccError, ValueError):
    pass


class Degenerate(PccError, ValueError):
    pass


class DimensionMismatch(PccError, ValueError):
    pass


class NonBinary(PccError, ValueError):
    """A label vector contains an entry other than +1 or -1."""


class Unbalanced(PccError, ValueError):
    pass


class TooLarge(PccError):
    """Refused to run an O(n^2) or exponential routine above its size guard."""


class KernelMismatch(PccError):
    """(D - B) x != 0, i.e. the dual diagonal was not built from x."""


class NotPsd(PccError):
    pass


class NoConvergenceWarning(UserWarning):
    pass
