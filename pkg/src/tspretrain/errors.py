"""Exception types shared across the package."""


class TsPretrainError(Exception):
    """Base class for all package-specific errors."""


class InvalidConfigError(TsPretrainError, ValueError):
    """A configuration value violates its documented constraints."""


class DataShapeError(TsPretrainError, ValueError):
    """An array has the wrong dimensionality or incompatible sizes."""


class SchemaError(TsPretrainError, ValueError):
    """A manifest or data file disagrees with its declared schema."""


class DatasetIOError(TsPretrainError, OSError):
    """A dataset file is missing or unreadable; message names the item."""


class CheckpointError(TsPretrainError, ValueError):
    """Base class for checkpoint container problems."""


class CheckpointVersionError(CheckpointError):
    """Checkpoint header is unparseable or declares an unsupported version."""


class CheckpointTruncatedError(CheckpointError):
    """Checkpoint payload is shorter than the index promises."""


class UnknownTensorError(CheckpointError):
    """A tensor name is absent from (or unexpected in) a checkpoint."""


class TrainingDivergedError(TsPretrainError, RuntimeError):
    """Training produced a non-finite loss."""


class UndefinedMetricError(TsPretrainError, ValueError):
    """A metric is undefined for the given inputs (e.g. single-class AUC)."""
