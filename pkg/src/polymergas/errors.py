"""Exception hierarchy shared by every module."""


class PolymerGasError(ValueError):
    """Base class for malformed input or evaluation outside a valid region."""


class InvalidPolymerError(PolymerGasError):
    pass


class EnumerationCapError(PolymerGasError):
    pass


class ZeroPartitionError(PolymerGasError):
    """Raised when a ratio would divide by a vanishing partition function."""


class PositivityError(PolymerGasError):
    """Raised when a log is requested of a nonpositive partition function."""


class FormatError(PolymerGasError):
    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno
