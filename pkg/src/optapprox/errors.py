"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and an ``exit_status``
used by the command-line front end (2 for validation problems, 3 for
numerical failures).
"""


class OptApproxError(Exception):
    code = "ERROR"
    exit_status = 2


class ValidationError(OptApproxError, ValueError):
    code = "VALIDATION"


class NumericalFailure(OptApproxError, ArithmeticError):
    code = "NUMERICAL"
    exit_status = 3


class InvalidWeights(ValidationError):
    code = "INVALID_WEIGHTS"


class TailForbidden(ValidationError, IndexError):
    code = "TAIL_FORBIDDEN"


class NotOrthonormal(ValidationError):
    code = "NOT_ORTHONORMAL"


class OutsideDisc(ValidationError):
    code = "OUTSIDE_DISC"


class TailNotConvergent(NumericalFailure):
    code = "TAIL_NOT_CONVERGENT"


class ZeroAtOrigin(ValidationError, ZeroDivisionError):
    code = "ZERO_AT_ORIGIN"


class NotUnimodular(ValidationError):
    code = "NOT_UNIMODULAR"


class ZeroFunction(ValidationError):
    code = "ZERO_FUNCTION"


class NotPositiveDefinite(NumericalFailure):
    code = "NOT_POSITIVE_DEFINITE"

    def __init__(self, message, pivot_index=None, numerical_rank=None):
        super().__init__(message)
        self.pivot_index = pivot_index
        self.numerical_rank = numerical_rank


class DegreeZero(ValidationError):
    code = "DEGREE_ZERO"


class NoConvergence(NumericalFailure):
    code = "NO_CONVERGENCE"


class NotPositiveCoefficients(ValidationError):
    code = "NOT_POSITIVE_COEFFICIENTS"


class RootInOpenDisc(ValidationError):
    code = "ROOT_IN_OPEN_DISC"


class ParseError(ValidationError):
    code = "PARSE_ERROR"

    def __init__(self, message, text=None, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.text = text
        self.position = position


class IllConditionedWarning(RuntimeWarning):
    """The Gram system is badly conditioned; results are returned but flagged."""
