"""Exception types shared across the package."""


class AtomWallError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AtomWallError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(AtomWallError):
    """A model or run configuration is incomplete or inconsistent."""


class FileLocatedError(ConfigError):
    """Error tied to a location in an input file."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        loc = ""
        if path is not None:
            loc = f"{path}: " if line is None else f"{path}:{line}: "
        super().__init__(loc + message)


class ParseError(FileLocatedError):
    """An input file could not be read or tokenized."""


class ValidationError(FileLocatedError):
    """Parsed content violates a documented invariant."""


class ConvergenceError(AtomWallError):
    """A quadrature or series did not converge within its budget.

    Diagnostics (last estimates, orders, term counts) are kept in the
    ``diagnostics`` dict for post-mortem inspection.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = dict(diagnostics)


class UsageError(AtomWallError):
    """Operations were combined in an unsupported way."""
