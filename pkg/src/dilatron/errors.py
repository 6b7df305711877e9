"""Exception hierarchy shared by every dilatron module."""


class DilatronError(Exception):
    """Base class for all errors raised by dilatron."""


class ShapeMismatch(DilatronError, ValueError):
    """Raised when matrix or tuple dimensions are inconsistent."""


class NotHermitian(DilatronError, ValueError):
    pass


class NotPSD(DilatronError, ValueError):
    pass


class NotContraction(DilatronError, ValueError):
    """Raised when an operator norm exceeds ``1 + eps_psd``."""


class NotUnitary(DilatronError, ValueError):
    pass


class NotCommuting(DilatronError, ValueError):
    pass


class NotDoublyCommuting(DilatronError, ValueError):
    pass


class FugledeResidual(DilatronError, ValueError):
    """Raised when a pair commutes but ``u v* - v* u`` is numerically large.

    In exact arithmetic Fuglede's theorem makes this impossible for unitary
    ``u``; hitting it means the input is inconsistent at the working
    tolerance.
    """


class NotInvariant(DilatronError, ValueError):
    pass


class NotInDisc(DilatronError, ValueError):
    pass


class NotCP(DilatronError, ValueError):
    pass


class DegreeExceedsOrder(DilatronError, ValueError):
    pass


class DegenerateFailure(DilatronError, RuntimeError):
    """Raised when joint diagonalization cannot reach its residual target."""


class InputError(DilatronError, ValueError):
    """Raised for malformed serialized input.

    The message starts with a field path such as ``ops[1].data[0][2]``.
    """
