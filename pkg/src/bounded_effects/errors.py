"""Exception hierarchy.

Data problems (bad files, broken invariants) derive from :class:`DataError`;
problems that only surface while estimating derive from
:class:`EstimationError`. The CLI maps the two families to distinct exit codes.
"""


class BoundedEffectsError(Exception):
    """Base class for all package errors."""


class DataError(BoundedEffectsError):
    pass


class MissingColumn(DataError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"missing column: {column!r}")


class ParseError(DataError):
    def __init__(self, row, column, detail=""):
        self.row = row
        self.column = column
        msg = f"row {row}, column {column!r}: cannot parse"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InvariantViolation(DataError):
    def __init__(self, row, rule, detail=""):
        self.row = row
        self.rule = rule
        msg = f"row {row}: {rule}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InvalidConfig(BoundedEffectsError):
    pass


class DirectionMissing(InvalidConfig):
    pass


class InvalidAlpha(InvalidConfig):
    pass


class EstimationError(BoundedEffectsError):
    pass


class EmptySelection(EstimationError):
    pass


class DegenerateTrim(EstimationError):
    pass


class DegenerateDenominator(EstimationError):
    def __init__(self, quantity):
        self.quantity = quantity
        super().__init__(f"vanishing denominator: {quantity} = 0")


class DivisionByZeroBaseline(DegenerateDenominator):
    pass


class TooManyDegenerateReplicates(EstimationError):
    def __init__(self, dropped, total):
        self.dropped = dropped
        self.total = total
        super().__init__(
            f"{dropped} of {total} bootstrap replicates were degenerate (limit 10%)"
        )
