"""Exception types raised by the estimators and loaders."""


class PulseError(ValueError):
    """Base class for all errors raised by this package."""


class InvalidParameterError(PulseError):
    pass


class EmptySupportError(PulseError):
    """No sample of the signal lies above the detection level."""


class EmptyInputError(PulseError):
    pass


class InsufficientStructureError(PulseError):
    """The diagram is too small (or degenerate) to place a split threshold."""


class NoSplitError(PulseError):
    """No gap in the support exceeds the split threshold."""


class NonUniformSamplingError(PulseError):
    pass


class NoPeakError(PulseError):
    pass


class OutOfRangeError(PulseError):
    pass


class ParseError(PulseError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
