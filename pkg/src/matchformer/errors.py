"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: usage/configuration problems -> 1,
data integrity problems -> 2, numeric failures -> 3.
"""


class MatchformerError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(MatchformerError):
    """Invalid configuration: unknown adapter, bad hyperparameters, bad flags."""

    exit_code = 1


class ParseError(MatchformerError):
    """Malformed input file. Carries the byte offset when known."""

    exit_code = 2

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class IntegrityError(MatchformerError):
    """Inconsistent data: missing players, mismatched rows, corrupt artifacts."""

    exit_code = 2


class CapacityError(IntegrityError):
    """A match exceeds the fixed sequence capacity."""


class DimensionError(MatchformerError):
    """Tensor shape mismatch; names both offending shapes."""

    exit_code = 3


class NumericError(MatchformerError):
    """Non-finite values or other numeric failures during training."""

    exit_code = 3
