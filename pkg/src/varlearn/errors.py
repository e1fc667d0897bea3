"""Exception hierarchy shared across the package."""


class VarLearnError(Exception):
    """Base class for all errors raised by varlearn."""


class InvalidInputError(VarLearnError, ValueError):
    """Input violates a documented precondition."""


class DegenerateSampleError(VarLearnError, ValueError):
    """Sample geometry makes the requested quantity undefined."""


class CapacityError(VarLearnError, RuntimeError):
    """A size cap (simplex count, basis size) would be exceeded."""


class VarLearnWarning(UserWarning):
    """Points or trials were excluded from a computation."""
