"""Exception hierarchy shared by every module."""


class MudomError(Exception):
    """Base class for errors raised by :mod:`mudom`."""


class InvalidSpecError(MudomError, ValueError):
    """Block sizes (or another structural description) are malformed."""


class InvalidArgumentError(MudomError, ValueError):
    """An argument has the wrong shape, length or range."""


class SizeError(MudomError):
    """A table or grid would exceed the configured size caps."""


class BudgetError(MudomError):
    """A certification or search ran out of its cell/sample budget."""


class NumericFailure(MudomError, ArithmeticError):
    """An iterative numeric method failed to converge."""


class InvalidStateError(MudomError):
    """A documented precondition was found violated during computation."""


class InconsistentStateError(MudomError):
    """Two computations that must agree produced contradictory results."""


class UndeterminedError(MudomError):
    """The answer lies inside a tolerance band and cannot be decided."""
