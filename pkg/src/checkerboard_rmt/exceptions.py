"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter violates an operation's precondition."""


class DimensionError(ParameterError):
    """Matrix or vector dimensions are incompatible."""


class AlgebraMismatchError(TypeError):
    """An operation received a matrix over the wrong division algebra."""


class HermitianInvariantError(ValueError):
    """A matrix failed the self-adjointness check at construction."""


class NumericalDegeneracyError(ArithmeticError):
    """Eigensolution produced results inconsistent with an exact structural guarantee."""


class EigensolveError(ArithmeticError):
    """The underlying eigendecomposition failed to converge."""


class RegimeOverlapError(RuntimeError):
    """An eigenvalue could not be classified into exactly one spectral regime."""


class EnumerationBudgetError(RuntimeError):
    """An exact enumeration would exceed the configured budget."""


class PrecisionLossError(ArithmeticError):
    """Catastrophic cancellation detected in a floating-point accumulation."""


class StatisticalPowerWarning(UserWarning):
    """A statistical probe was configured with too few trials to be conclusive."""
