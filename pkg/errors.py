"""Exception hierarchy for the epoint toolkit.

Library code raises these; only the CLI handlers catch them and turn them
into exit codes.
"""


class EPointError(Exception):
    """Base class for every error raised by the package."""


class InvalidArgumentError(EPointError, ValueError):
    """Non-finite or otherwise malformed numerical input."""


class ModelValidationError(EPointError, ValueError):
    """Model parameters violate an assumption of the model."""


class DegenerateModelError(ModelValidationError):
    """H0 and H1 (nearly) commute, or an EP formula is undefined."""


class PreconditionError(EPointError):
    """An operation was called outside the parameter family it covers."""


class PathDegeneracyError(EPointError):
    """A loop passes too close to an exceptional point."""


class TrackingFailureError(EPointError):
    """Branch tracking could not resolve the assignment within budget."""


class ConfigError(EPointError):
    """A run configuration file is missing, malformed or inconsistent."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(message)
        self.line = line
        self.column = column
