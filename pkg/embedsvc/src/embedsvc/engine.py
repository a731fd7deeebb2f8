"""Chunked embedding core shared by the HTTP service and batch mode.

Text is model-tokenized, truncated to a fixed content-token budget,
and split into four consecutive chunks. Each chunk runs through the
model inside one position window; the two special tokens occupy part
of that window, so a 512-position window carries at most 510 content
tokens. The chunk vector is the mean over content-token outputs only
(special positions excluded; sequences are never padded), computed in
the model's native 32-bit precision. An empty chunk yields zeros.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

from .checkpoint import LoadedCheckpoint
from .errors import RequestError

CHUNK_COUNT = 4
DEFAULT_CHUNK_SIZE = 512
DEFAULT_MAX_TOKENS = CHUNK_COUNT * DEFAULT_CHUNK_SIZE
SPECIAL_POSITIONS = 2
EMBED_DIM = 768


@dataclass(frozen=True)
class EmbedResult:
    chunk_vectors: list[list[float]]
    token_counts: list[int]
    token_matrices: list[list[list[float]]] | None

    @property
    def flat_vector(self) -> list[float]:
        return [v for chunk in self.chunk_vectors for v in chunk]


class EmbedEngine:
    """Stateless embedder around a loaded checkpoint."""

    def __init__(self, checkpoint: LoadedCheckpoint, model_id: str):
        self._tokenizer = checkpoint.tokenizer
        self._model = checkpoint.model
        self.model_id = model_id
        self.checkpoint_sha256 = checkpoint.sha256

    def embed_text(self, text: str,
                   max_tokens: int = DEFAULT_MAX_TOKENS,
                   chunk_size: int = DEFAULT_CHUNK_SIZE,
                   want_token_matrix: bool = False) -> EmbedResult:
        if chunk_size * CHUNK_COUNT != max_tokens:
            raise RequestError(f"chunk_size x {CHUNK_COUNT} must equal "
                               f"max_tokens, got {chunk_size} x "
                               f"{CHUNK_COUNT} != {max_tokens}")
        if chunk_size <= SPECIAL_POSITIONS:
            raise RequestError(f"chunk_size must exceed "
                               f"{SPECIAL_POSITIONS}, got {chunk_size}")
        limit = self._model.config.max_position_embeddings
        if chunk_size > limit:
            raise RequestError(f"chunk_size {chunk_size} exceeds the "
                               f"model's {limit} positions")

        ids = self._tokenizer.encode(text, add_special_tokens=False)
        ids = ids[:max_tokens]
        capacity = chunk_size - SPECIAL_POSITIONS
        cls_id = self._tokenizer.cls_token_id
        sep_id = self._tokenizer.sep_token_id

        vectors: list[list[float]] = []
        counts: list[int] = []
        matrices: list[list[list[float]]] = []
        with torch.inference_mode():
            for c in range(CHUNK_COUNT):
                window = ids[c * capacity:(c + 1) * capacity]
                counts.append(len(window))
                if not window:
                    vectors.append([0.0] * EMBED_DIM)
                    matrices.append([])
                    continue
                input_ids = torch.tensor([[cls_id, *window, sep_id]])
                hidden = self._model(input_ids=input_ids)
                content = hidden.last_hidden_state[0][1:-1]
                pooled = content.mean(dim=0)
                vectors.append([float(v) for v in pooled])
                if want_token_matrix:
                    matrices.append([[float(v) for v in row]
                                     for row in content])
        return EmbedResult(chunk_vectors=vectors, token_counts=counts,
                           token_matrices=matrices if want_token_matrix
                           else None)
