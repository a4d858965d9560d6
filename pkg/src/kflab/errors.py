"""Exception taxonomy shared across the package.

DomainError covers bad numeric/structural arguments (CLI exit code 2).
InfeasibleError covers well-formed requests with no possible answer
(odd pairing totals, impossible degree splits, resampling exhaustion;
CLI exit code 3).
"""


class KflabError(Exception):
    pass


class DomainError(KflabError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConvergenceError(KflabError, RuntimeError):
    """A bracketing or iterative search failed to converge."""


class InfeasibleError(KflabError, ValueError):
    """No object with the requested properties exists."""


class ParityError(InfeasibleError):
    """An odd total where a perfect pairing was required."""


class ExhaustionError(InfeasibleError):
    """Retry budget spent without producing an admissible sample."""
