"""Exception taxonomy shared across the package.

Exit-code mapping used by the CLI: ValidationError and subclasses -> 1,
BudgetError -> 2, MinimalityViolation -> 3.
"""


class ValidationError(ValueError):
    """Malformed input: bad tree data, bad config, violated precondition."""


class UnknownIdError(ValidationError):
    """A path or process identifier that the tree does not define."""


class NotAdaptedError(ValidationError):
    """An operation that requires adapted assets was given a filtration
    to which some asset in the group is not adapted."""


class InfeasibleMarketError(ValidationError):
    """An operation whose precondition is an existing martingale measure
    was called on an infeasible (tree, filtration, group) triple."""


class EstimationError(ValidationError):
    """Singular normal equations in an unregularised least-squares fit."""


class BudgetError(RuntimeError):
    """An enumeration or construction would exceed its declared size caps."""


class MinimalityViolation(RuntimeError):
    """The verified-structure checks failed: the meet of the pricing-feasible
    filtrations did not come out as the unique minimal element equal to the
    natural filtration.  Never expected to fire; kept as a hard flag."""
