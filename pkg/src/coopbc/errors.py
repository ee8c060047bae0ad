"""Exception types shared across the toolkit."""


class CoopBCError(Exception):
    """Base class for all toolkit errors."""


class AxisNotFoundError(CoopBCError, KeyError):
    pass


class InvalidPartitionError(CoopBCError, ValueError):
    pass


class DomainError(CoopBCError, ValueError):
    pass


class NumericalConsistencyError(CoopBCError, ArithmeticError):
    """A quantity that must be nonnegative (or an identity that must hold)
    came out wrong by more than rounding can explain."""


class IncompatibleAlphabetsError(CoopBCError, ValueError):
    pass


class NotDegradableError(DomainError):
    pass


class InvalidSchemeError(CoopBCError, ValueError):
    pass


class UnboundedRegionError(CoopBCError, ValueError):
    pass


class DegenerateBaseError(CoopBCError, ValueError):
    pass


class CapacityBudgetError(CoopBCError, MemoryError):
    pass
