"""Exception hierarchy shared by every stage of the reduction."""


class ReductionError(Exception):
    """Base class for all errors raised by this package."""


class ReducibleModulus(ReductionError, ValueError):
    pass


class DegreeMismatch(ReductionError, ValueError):
    pass


class SpecMismatch(ReductionError, ValueError):
    pass


class ZeroInverse(ReductionError, ZeroDivisionError):
    pass


class DuplicateNode(ReductionError, ValueError):
    pass


class DimensionMismatch(ReductionError, ValueError):
    pass


class DegeneratePoints(ReductionError, ValueError):
    pass


class PrefixTooLong(ReductionError, ValueError):
    pass


class BudgetExceeded(ReductionError):
    pass


class TooManyEquations(ReductionError, ValueError):
    pass


class NotPowerOfTwo(ReductionError, ValueError):
    pass


class NotSatisfying(ReductionError):
    pass


class MissingTableEntry(ReductionError, KeyError):
    pass


class InfeasibleTarget(ReductionError):
    pass


class Infeasible(ReductionError):
    """Raised by the brute-force MWSPP oracle when B_f x = t has no solution."""


class EmptySet(ReductionError):
    pass


class InvalidEpsilon(ReductionError, ValueError):
    pass


class InputError(ReductionError, ValueError):
    """Malformed external input (DIMACS, serialized instances)."""
