"""Exception types raised across the package."""


class NodeTourError(Exception):
    """Base class for every error this package raises on purpose."""


class InvalidSizeError(NodeTourError):
    """Instance size below the minimum of 3 nodes."""


class InvalidTourError(NodeTourError):
    """A tour that is not a permutation of 0..n-1 was given where a valid one is required."""


class InsufficientCandidatesError(NodeTourError):
    """Fewer candidate nodes remain than the requested neighbour count."""


class ParseError(NodeTourError):
    """Malformed instance or tour file."""

    def __init__(self, message: str, path=None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f"{path}:"
        if line is not None:
            loc += f"{line}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.path = path
        self.line = line


class ProtocolError(NodeTourError):
    """Feature or prediction CSV violates the documented exchange format."""


class MissingContextError(NodeTourError):
    """The oracle predictor was invoked without a reference tour."""


class AdapterError(NodeTourError):
    """External predictor process failed; carries captured diagnostics."""

    def __init__(self, message: str, command=None, returncode=None, stderr: str = ""):
        detail = message
        if command is not None:
            detail += f" (command: {' '.join(map(str, command))})"
        if returncode is not None:
            detail += f" (exit {returncode})"
        if stderr:
            detail += "\n--- adapter stderr ---\n" + stderr.strip()[-2000:]
        super().__init__(detail)
        self.command = command
        self.returncode = returncode
        self.stderr = stderr


class IncompletePredictionsError(NodeTourError):
    """Prediction set does not cover every node exactly once with finite values."""


class DegenerateScoresError(NodeTourError):
    """All off-diagonal score entries are zero or non-finite; no normalization scale exists."""


class SizeCapError(NodeTourError):
    """Exact solve requested above the hard instance-size cap."""


class InvalidBaselineError(NodeTourError):
    """Gap computation against a nonpositive baseline length."""
