"""Exception hierarchy.

Data problems (bad input files, empty or non-finite samples) derive from
``DataError``; problems that only show up while computing a p-value derive
from ``ComputationError``.  The CLI maps these two families to distinct exit
codes.
"""


class DistgradeError(Exception):
    """Base class for every error raised by this package."""


class DataError(DistgradeError, ValueError):
    pass


class ComputationError(DistgradeError):
    pass


class EmptySample(DataError):
    def __init__(self, msg="sample has no observations"):
        super().__init__(msg)


class NonFiniteValue(DataError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"non-finite value at index {index}")


class DegenerateSample(DataError):
    """Raised when normal parameters cannot be estimated (n < 2 or zero spread)."""

    def __init__(self, msg="sample is degenerate", variable=None, scenario=None):
        self.variable = variable
        self.scenario = scenario
        if variable is not None:
            msg = f"{variable}/{scenario}: {msg}"
        super().__init__(msg)


class BadHeader(DataError):
    def __init__(self, found):
        self.found = found
        super().__init__(
            f"line 1: expected header 'variable,scenario,value', found {found!r}"
        )


class BadValue(DataError):
    def __init__(self, line, text):
        self.line = line
        self.text = text
        super().__init__(f"line {line}: cannot parse value {text!r}")


class BadScenario(DataError):
    def __init__(self, line, text):
        self.line = line
        self.text = text
        super().__init__(f"line {line}: unknown scenario label {text!r}")


class BadRow(DataError):
    def __init__(self, line, text):
        self.line = line
        self.text = text
        super().__init__(f"line {line}: expected 3 fields, got {text!r}")


class EmptyDataset(DataError):
    def __init__(self, msg="dataset has no observations"):
        super().__init__(msg)


class ExactMethodUnavailable(ComputationError):
    """The exact null distribution is not computed for this sample size.

    Callers have to opt into the asymptotic method explicitly.
    """
