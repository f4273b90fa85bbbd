"""Exception types raised by the solver library."""


class SrrLassoError(Exception):
    """Base class for all library errors."""


class NumericFailure(SrrLassoError, ArithmeticError):
    """A non-finite value appeared, or an iterative kernel failed to converge."""


class DegenerateRefinement(SrrLassoError, ValueError):
    """The line-search function g has no unique positive minimizer."""


class ParseError(SrrLassoError, ValueError):
    """Malformed input file."""

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc = f"{path}"
            if line is not None:
                loc += f":{line}"
            loc += ": "
        super().__init__(loc + message)
        self.path = path
        self.line = line


class ZeroColumnError(SrrLassoError, ValueError):
    """The design matrix contains an all-zero column."""


class UnsupportedScale(SrrLassoError, ValueError):
    """Input too large for a dense desk-scale computation."""
