"""Exception types shared across the package."""


class BiaslensError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(BiaslensError):
    """Array shapes do not satisfy an operation's contract."""


class DeterminismError(BiaslensError):
    """A loss function that must be deterministic returned differing values."""


class ConfigError(BiaslensError):
    """A configuration value is out of its allowed range."""


class InputError(BiaslensError):
    """Input data violates an operation's precondition."""


class StateError(BiaslensError):
    """Operation invoked out of order (e.g. backward without a forward cache)."""


class CompatibilityError(BiaslensError):
    """Checkpoint and vocabulary (or other paired artifacts) do not match."""


class VersionError(CompatibilityError):
    """Checkpoint format version is not supported."""


class FormatError(BiaslensError):
    """A persisted file is malformed or truncated."""


class OrderingError(BiaslensError):
    """Pretraining stages are not ordered general-before-domain."""


class StratificationError(BiaslensError):
    """A labeled partition is missing one of the required classes."""


class SizeLimitError(BiaslensError):
    """Input exceeds the configured maximum size."""


class UndefinedMetricError(BiaslensError):
    """A metric is undefined for the given inputs (e.g. single-class AUC)."""
