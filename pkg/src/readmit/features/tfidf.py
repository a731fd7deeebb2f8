"""TF-IDF vectorizer with smooth inverse document frequency.

idf(t) = ln((1 + n_docs) / (1 + doc_freq(t))) + 1, so no term ever gets
zero weight. Vocabulary is ranked by corpus frequency (ties by term) and
truncated to max_features.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DimensionError, SchemaError
from ..textprep import TokenizedDoc

TFIDF_FORMAT_VERSION = 1
DEFAULT_MAX_FEATURES = 5000


@dataclass(frozen=True)
class SparseVector:
    dimension: int
    entries: tuple[tuple[int, float], ...]

    def __post_init__(self):
        previous = -1
        for index, value in self.entries:
            if index <= previous or index >= self.dimension:
                raise DimensionError(
                    f"sparse index {index} out of order or out of range "
                    f"for dimension {self.dimension}")
            if not math.isfinite(value) or value == 0.0:
                raise DimensionError(f"sparse value at {index} must be "
                                     f"finite and non-zero, got {value!r}")
            previous = index

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dimension)
        for index, value in self.entries:
            dense[index] = value
        return dense

    def norm(self) -> float:
        return math.sqrt(sum(v * v for _, v in self.entries))


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: dict[str, int]
    doc_freq: tuple[int, ...]
    idf: tuple[float, ...]
    n_docs: int

    @property
    def dimension(self) -> int:
        return len(self.vocabulary)


def tfidf_fit(corpus: list[TokenizedDoc],
              max_features: int | None = DEFAULT_MAX_FEATURES) -> TfidfModel:
    """Build the vocabulary and idf table from a tokenized corpus."""
    if not corpus:
        raise ConfigError("cannot fit TF-IDF on an empty corpus")
    if max_features is not None and max_features < 1:
        raise ConfigError(f"max_features must be >= 1, got {max_features}")

    corpus_freq: dict[str, int] = {}
    doc_freq: dict[str, int] = {}
    for doc in corpus:
        for token in doc.tokens:
            corpus_freq[token] = corpus_freq.get(token, 0) + 1
        for token in set(doc.tokens):
            doc_freq[token] = doc_freq.get(token, 0) + 1

    ranked = sorted(corpus_freq, key=lambda t: (-corpus_freq[t], t))
    if max_features is not None:
        ranked = ranked[:max_features]

    n_docs = len(corpus)
    vocabulary = {term: index for index, term in enumerate(ranked)}
    freqs = tuple(doc_freq[t] for t in ranked)
    idf = tuple(math.log((1 + n_docs) / (1 + df)) + 1.0 for df in freqs)
    return TfidfModel(vocabulary=vocabulary, doc_freq=freqs, idf=idf,
                      n_docs=n_docs)


def tfidf_transform(model: TfidfModel, doc: TokenizedDoc) -> SparseVector:
    """Count x idf per in-vocabulary term, L2-normalized."""
    counts: dict[int, int] = {}
    for token in doc.tokens:
        index = model.vocabulary.get(token)
        if index is not None:
            counts[index] = counts.get(index, 0) + 1
    if not counts:
        return SparseVector(dimension=model.dimension, entries=())

    entries = [(index, count * model.idf[index])
               for index, count in sorted(counts.items())]
    norm = math.sqrt(sum(v * v for _, v in entries))
    entries = tuple((index, value / norm) for index, value in entries)
    return SparseVector(dimension=model.dimension, entries=entries)


def densify(vectors: list[SparseVector]) -> np.ndarray:
    """Stack sparse vectors into a dense matrix at the model boundary."""
    if not vectors:
        raise ConfigError("cannot densify an empty vector list")
    dimension = vectors[0].dimension
    matrix = np.zeros((len(vectors), dimension))
    for row, vector in enumerate(vectors):
        if vector.dimension != dimension:
            raise DimensionError(f"row {row} has dimension "
                                 f"{vector.dimension}, expected {dimension}")
        for index, value in vector.entries:
            matrix[row, index] = value
    return matrix


def save_tfidf(model: TfidfModel, path) -> None:
    terms = sorted(model.vocabulary, key=model.vocabulary.get)
    payload = {
        "format_version": TFIDF_FORMAT_VERSION,
        "n_docs": model.n_docs,
        "terms": terms,
        "doc_freq": list(model.doc_freq),
        "idf": list(model.idf),
    }
    with open(path, "w", encoding="utf-8") as stream:
        json.dump(payload, stream, sort_keys=True, indent=2)
        stream.write("\n")


def load_tfidf(path) -> TfidfModel:
    with open(path, "r", encoding="utf-8") as stream:
        payload = json.load(stream)
    if payload.get("format_version") != TFIDF_FORMAT_VERSION:
        raise SchemaError(f"unsupported TF-IDF model version "
                          f"{payload.get('format_version')!r}")
    terms = payload["terms"]
    return TfidfModel(
        vocabulary={term: index for index, term in enumerate(terms)},
        doc_freq=tuple(payload["doc_freq"]),
        idf=tuple(payload["idf"]),
        n_docs=payload["n_docs"],
    )
