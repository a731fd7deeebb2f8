"""Chunked BERT embedding service for cleaned discharge summaries."""

from .batch import BatchSummary, embed_file, progress_path
from .checkpoint import (LoadedCheckpoint, checkpoint_hash, init_checkpoint,
                         load_checkpoint, pinned_hash)
from .engine import (CHUNK_COUNT, DEFAULT_CHUNK_SIZE, DEFAULT_MAX_TOKENS,
                     EMBED_DIM, EmbedEngine, EmbedResult)
from .errors import (BatchError, CheckpointError, CheckpointMismatchError,
                     EmbedsvcError, RequestError)
from .service import (DEFAULT_MODEL_ID, TRANSPORT_LIMIT_BYTES,
                      EmbedRequest, EmbedResponse, ServiceSettings,
                      create_app)

__all__ = [
    "BatchError",
    "BatchSummary",
    "CHUNK_COUNT",
    "CheckpointError",
    "CheckpointMismatchError",
    "DEFAULT_CHUNK_SIZE",
    "DEFAULT_MAX_TOKENS",
    "DEFAULT_MODEL_ID",
    "EMBED_DIM",
    "EmbedEngine",
    "EmbedRequest",
    "EmbedResponse",
    "EmbedResult",
    "EmbedsvcError",
    "LoadedCheckpoint",
    "RequestError",
    "ServiceSettings",
    "TRANSPORT_LIMIT_BYTES",
    "checkpoint_hash",
    "create_app",
    "embed_file",
    "init_checkpoint",
    "load_checkpoint",
    "pinned_hash",
    "progress_path",
]
