"""Exception hierarchy shared across the package."""


class CountermachineError(Exception):
    """Base class for all countermachine errors."""


class DimensionMismatch(CountermachineError):
    """Input vector length does not match the model's input count."""


class MalformedModel(CountermachineError):
    """Model document or model construction violates an invariant."""


class RuleCapExceeded(CountermachineError):
    """Grid rule generation would exceed the configured rule cap."""


class SingularSystem(CountermachineError):
    """Unregularized least-squares system is rank-deficient."""


class TrainingDiverged(CountermachineError):
    """Fitted outputs left the sanity interval on the training inputs."""


class NonFiniteObjective(CountermachineError):
    """Objective returned NaN or infinity during annealing."""


class DegenerateFeature(CountermachineError):
    """Min-max normalization is undefined: feature min equals max."""


class InsufficientClassRows(CountermachineError):
    """Not enough rows of a class to satisfy the requested split."""


class ParseError(CountermachineError):
    """CSV cell or header could not be parsed.

    `row` is the 1-based data-row number (header not counted); `column` is
    the column name. Either may be None for file-level problems.
    """

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class RangeError(CountermachineError):
    """Parsed value violates its domain invariant."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column
