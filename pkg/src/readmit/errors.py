"""Exception types shared across the pipeline stages."""


class ReadmitError(Exception):
    """Base class for all pipeline errors."""


class SchemaError(ReadmitError):
    """An input file does not conform to its declared schema."""


class InputDataError(ReadmitError):
    """An input file is missing or unreadable."""


class ConfigError(ReadmitError):
    """Invalid configuration or flag combination."""


class DimensionError(ReadmitError):
    """A vector or matrix has the wrong shape for the requested operation."""


class TrainingDivergedError(ReadmitError):
    """Training produced a non-finite loss or non-finite parameters."""

    def __init__(self, message: str, iteration: int | None = None,
                 loss: float | None = None):
        super().__init__(message)
        self.iteration = iteration
        self.loss = loss
