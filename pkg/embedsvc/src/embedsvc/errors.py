"""Exception taxonomy for the embedding service."""


class EmbedsvcError(Exception):
    """Base class for all embedsvc failures."""


class CheckpointError(EmbedsvcError):
    """Checkpoint directory is missing, incomplete, or unpinned."""


class CheckpointMismatchError(CheckpointError):
    """Weights on disk do not hash to the pinned value."""


class RequestError(EmbedsvcError):
    """An embed request violates the chunking contract."""


class BatchError(EmbedsvcError):
    """Batch input file cannot be processed."""
