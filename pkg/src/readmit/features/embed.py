"""Chunked mean-pooled document embeddings.

A document's tokens are truncated to 2048, split into four consecutive
512-token chunks, each chunk embedded to a token x 768 matrix and
mean-pooled; the four 768-vectors concatenate to one 3072-vector. The
mock embedder stands in for the external model provider offline.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import urllib.request
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DimensionError, InputDataError

EMBED_DIM = 768
CHUNK_COUNT = 4
CHUNK_SIZE = 512
MAX_TOKENS = CHUNK_COUNT * CHUNK_SIZE
DOC_DIM = CHUNK_COUNT * EMBED_DIM

EMBEDDING_HEADER = ["HADM_ID"] + [f"E{i:04d}" for i in range(DOC_DIM)]


@dataclass(frozen=True)
class DocumentEmbedding:
    hadm_id: int
    vector: np.ndarray
    chunk_token_counts: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.vector.shape != (DOC_DIM,):
            raise DimensionError(f"document vector must have shape "
                                 f"({DOC_DIM},), got {self.vector.shape}")
        if not np.all(np.isfinite(self.vector)):
            raise DimensionError("document vector contains non-finite values")


def chunk_tokens(tokens: list[str], chunk_size: int = CHUNK_SIZE,
                 max_tokens: int = MAX_TOKENS,
                 ) -> tuple[list[list[str]], list[int]]:
    """Truncate to max_tokens and split into four consecutive chunks."""
    if chunk_size * CHUNK_COUNT != max_tokens:
        raise ConfigError(f"chunk_size x {CHUNK_COUNT} must equal "
                          f"max_tokens, got {chunk_size} x {CHUNK_COUNT} "
                          f"!= {max_tokens}")
    kept = tokens[:max_tokens]
    chunks = [list(kept[i * chunk_size:(i + 1) * chunk_size])
              for i in range(CHUNK_COUNT)]
    counts = [len(chunk) for chunk in chunks]
    return chunks, counts


_token_cache: dict[tuple[str, int], np.ndarray] = {}


def token_vector(token: str, seed: int) -> np.ndarray:
    """Deterministic 768-vector for one token, components in [-1, 1].

    The vector is a pure function of (token bytes, seed): a keyed blake2b
    digest of the token seeds a PCG64 generator, so results are stable
    across runs and platforms.
    """
    key = (token, seed)
    cached = _token_cache.get(key)
    if cached is None:
        digest = hashlib.blake2b(
            token.encode("utf-8"), digest_size=16,
            key=seed.to_bytes(8, "little", signed=True)).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        cached = rng.uniform(-1.0, 1.0, EMBED_DIM)
        cached.flags.writeable = False
        _token_cache[key] = cached
    return cached


def mock_token_embedder(tokens: list[str], seed: int = 0) -> np.ndarray:
    """Token matrix (n x 768) from the deterministic hash embedder."""
    if not tokens:
        return np.zeros((0, EMBED_DIM))
    return np.stack([token_vector(token, seed) for token in tokens])


def mean_pool(matrix: np.ndarray) -> np.ndarray:
    """Column-wise mean with fixed row-major accumulation order.

    The sequential accumulation (not a pairwise-summation mean) keeps the
    result bit-for-bit reproducible against a per-column running-sum
    reimplementation. Empty input pools to the zero vector.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return np.zeros(EMBED_DIM)
    if matrix.ndim != 2 or matrix.shape[1] != EMBED_DIM:
        raise DimensionError(f"token matrix must be n x {EMBED_DIM}, "
                             f"got shape {matrix.shape}")
    accumulator = np.zeros(matrix.shape[1])
    for row in matrix:
        accumulator = accumulator + row
    return accumulator / matrix.shape[0]


def assemble_document_embedding(chunk_vectors: list[np.ndarray],
                                counts: list[int],
                                hadm_id: int = 0) -> DocumentEmbedding:
    """Concatenate four 768-vectors into one 3072-dim document vector."""
    if len(chunk_vectors) != CHUNK_COUNT:
        raise DimensionError(f"expected {CHUNK_COUNT} chunk vectors, "
                             f"got {len(chunk_vectors)}")
    for i, vector in enumerate(chunk_vectors):
        if np.asarray(vector).shape != (EMBED_DIM,):
            raise DimensionError(f"chunk {i} has shape "
                                 f"{np.asarray(vector).shape}, expected "
                                 f"({EMBED_DIM},)")
    vector = np.concatenate([np.asarray(v, dtype=float)
                             for v in chunk_vectors])
    return DocumentEmbedding(hadm_id=hadm_id, vector=vector,
                             chunk_token_counts=tuple(counts))


def embed_document(tokens: list[str], seed: int = 0,
                   hadm_id: int = 0) -> DocumentEmbedding:
    """Full mock path: chunk, embed each chunk, pool, concatenate."""
    chunks, counts = chunk_tokens(tokens)
    pooled = [mean_pool(mock_token_embedder(chunk, seed))
              for chunk in chunks]
    return assemble_document_embedding(pooled, counts, hadm_id=hadm_id)


def embed_via_service(base_url: str, text: str,
                      timeout: float = 60.0,
                      hadm_id: int = 0) -> DocumentEmbedding:
    """Fetch chunk vectors from the embedding service over HTTP."""
    payload = json.dumps({"text": text}).encode("utf-8")
    request = urllib.request.Request(
        base_url.rstrip("/") + "/v1/embed", data=payload,
        headers={"Content-Type": "application/json"}, method="POST")
    try:
        with urllib.request.urlopen(request, timeout=timeout) as response:
            body = json.loads(response.read().decode("utf-8"))
    except OSError as exc:
        raise InputDataError(f"embedding service at {base_url} "
                             f"unreachable: {exc}") from exc
    vectors = [np.asarray(chunk, dtype=float)
               for chunk in body["chunk_vectors"]]
    counts = [int(c) for c in body["token_counts"]]
    return assemble_document_embedding(vectors, counts, hadm_id=hadm_id)


def write_embeddings(rows: list[DocumentEmbedding], sink) -> None:
    """Write the embedding CSV (HADM_ID + 3072 full-precision columns)."""
    stream, should_close = _open_writable(sink)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(EMBEDDING_HEADER)
        for row in rows:
            writer.writerow([row.hadm_id]
                            + [repr(float(v)) for v in row.vector])
    finally:
        if should_close:
            stream.close()


def read_embeddings(source) -> list[DocumentEmbedding]:
    """Read the embedding CSV, validating width and finiteness per row."""
    stream, should_close = _open_source(source)
    rows: list[DocumentEmbedding] = []
    try:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header is None or len(header) != len(EMBEDDING_HEADER) or \
                header[0] != "HADM_ID":
            raise DimensionError(
                f"embedding header must have {len(EMBEDDING_HEADER)} "
                f"columns starting with HADM_ID")
        for row_number, record in enumerate(reader, start=1):
            if len(record) != len(EMBEDDING_HEADER):
                raise DimensionError(
                    f"row {row_number}: expected {DOC_DIM} value columns, "
                    f"got {len(record) - 1}")
            values = np.array([float(v) for v in record[1:]])
            if not np.all(np.isfinite(values)):
                raise DimensionError(f"row {row_number}: non-finite "
                                     f"embedding value")
            rows.append(DocumentEmbedding(hadm_id=int(record[0]),
                                          vector=values,
                                          chunk_token_counts=None))
    finally:
        if should_close:
            stream.close()
    return rows


def _open_source(source):
    if hasattr(source, "read"):
        return source, False
    return open(source, "r", encoding="utf-8", newline=""), True


def _open_writable(destination):
    if hasattr(destination, "write"):
        return destination, False
    return open(destination, "w", encoding="utf-8", newline=""), True


def embeddings_matrix(rows: list[DocumentEmbedding],
                      ) -> tuple[np.ndarray, list[int]]:
    """Stack document vectors into (N x 3072, hadm_ids) for model input."""
    if not rows:
        raise ConfigError("no embedding rows to stack")
    matrix = np.stack([row.vector for row in rows])
    return matrix, [row.hadm_id for row in rows]
