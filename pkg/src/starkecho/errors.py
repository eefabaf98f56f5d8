"""Exception hierarchy shared across the package.

``ValidationError`` (and subclasses) marks bad inputs: configs, pulse
sequences, sequence files, detection windows.  The CLI maps it to exit
code 2.  Fit non-convergence is *not* an exception; it is reported via
``FitResult.converged``.
"""


class StarkEchoError(Exception):
    """Base class for all package errors."""


class ValidationError(StarkEchoError):
    """Invalid configuration, parameters or sequence structure."""


class SequenceError(ValidationError):
    """Pulse sequence violates timing/overlap constraints."""


class SequenceParseError(ValidationError):
    """Sequence file rejected; carries the offending location."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class WindowOverlapError(SequenceError):
    """A detection window overlaps an optical or Stark pulse."""


class NyquistError(ValidationError):
    """Sampling interval too coarse for the requested demodulation."""


class PeakNotFoundError(StarkEchoError):
    """No spectral bins inside the requested search window."""


class UnresolvablePeakError(StarkEchoError):
    """Requested spectral peak sits below the noise floor."""
