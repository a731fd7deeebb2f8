"""Document feature construction: TF-IDF, chunked embeddings, PCA."""

from .tfidf import (SparseVector, TfidfModel, densify, load_tfidf,
                    save_tfidf, tfidf_fit, tfidf_transform)
from .embed import (CHUNK_COUNT, CHUNK_SIZE, DOC_DIM, EMBED_DIM, MAX_TOKENS,
                    DocumentEmbedding, assemble_document_embedding,
                    chunk_tokens, embed_document, embed_via_service,
                    embeddings_matrix, mean_pool, mock_token_embedder,
                    read_embeddings, token_vector, write_embeddings)
from .pca import PcaModel, load_pca, pca_fit, pca_transform, save_pca

__all__ = [
    "SparseVector", "TfidfModel", "densify", "load_tfidf", "save_tfidf",
    "tfidf_fit", "tfidf_transform",
    "CHUNK_COUNT", "CHUNK_SIZE", "DOC_DIM", "EMBED_DIM", "MAX_TOKENS",
    "DocumentEmbedding", "assemble_document_embedding", "chunk_tokens",
    "embed_document", "embed_via_service", "embeddings_matrix", "mean_pool",
    "mock_token_embedder", "read_embeddings", "token_vector",
    "write_embeddings",
    "PcaModel", "load_pca", "pca_fit", "pca_transform", "save_pca",
]
