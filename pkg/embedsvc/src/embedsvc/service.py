"""HTTP layer: POST /v1/embed and GET /v1/health.

All errors are JSON objects with `error` and `detail` fields: 413 for
text beyond the transport limit, 503 while the model is not loaded,
400 for chunking violations, 422 for malformed request bodies.
Responses carry no timestamps or other varying state, so identical
requests produce identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, model_validator

from .checkpoint import load_checkpoint
from .engine import (CHUNK_COUNT, DEFAULT_CHUNK_SIZE, DEFAULT_MAX_TOKENS,
                     EmbedEngine)
from .errors import RequestError

TRANSPORT_LIMIT_BYTES = 1_048_576
DEFAULT_MODEL_ID = "bdsbert-tiny"


@dataclass(frozen=True)
class ServiceSettings:
    checkpoint_dir: str
    pinned_sha256: str
    model_id: str = DEFAULT_MODEL_ID


class EmbedRequest(BaseModel):
    text: str
    max_tokens: int = Field(DEFAULT_MAX_TOKENS, ge=CHUNK_COUNT)
    chunk_size: int = Field(DEFAULT_CHUNK_SIZE, ge=3, le=512)
    debug_token_matrix: bool = False

    @model_validator(mode="after")
    def _chunks_cover_budget(self):
        if self.chunk_size * CHUNK_COUNT != self.max_tokens:
            raise ValueError(f"chunk_size x {CHUNK_COUNT} must equal "
                             f"max_tokens, got {self.chunk_size} x "
                             f"{CHUNK_COUNT} != {self.max_tokens}")
        return self


class EmbedResponse(BaseModel):
    chunk_vectors: list[list[float]]
    token_counts: list[int]
    model_id: str
    debug_token_matrix: list[list[list[float]]] | None = None


def _error(status: int, error: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": error, "detail": detail})


def create_app(settings: ServiceSettings, load: bool = True) -> FastAPI:
    """Build the service; `load=False` starts in the loading state."""
    app = FastAPI(title="embedsvc")
    app.state.settings = settings
    app.state.engine = None

    def load_engine() -> None:
        checkpoint = load_checkpoint(settings.checkpoint_dir,
                                     settings.pinned_sha256)
        app.state.engine = EmbedEngine(checkpoint, settings.model_id)

    app.state.load_engine = load_engine
    if load:
        load_engine()

    @app.exception_handler(RequestValidationError)
    async def _on_validation(request: Request,
                             exc: RequestValidationError):
        return _error(422, "invalid request", str(exc.errors()))

    @app.exception_handler(RequestError)
    async def _on_request_error(request: Request, exc: RequestError):
        return _error(400, "invalid request", str(exc))

    @app.get("/v1/health")
    def health():
        status = "ok" if app.state.engine is not None else "loading"
        return {"status": status, "model_id": settings.model_id,
                "checkpoint_hash": settings.pinned_sha256}

    @app.post("/v1/embed", response_model=EmbedResponse,
              response_model_exclude_none=True)
    def embed(request: EmbedRequest):
        if app.state.engine is None:
            return _error(503, "model not loaded",
                          "the checkpoint is still loading; retry")
        if len(request.text.encode("utf-8")) > TRANSPORT_LIMIT_BYTES:
            return _error(413, "payload too large",
                          f"text exceeds the {TRANSPORT_LIMIT_BYTES} "
                          f"byte transport limit")
        result = app.state.engine.embed_text(
            request.text, max_tokens=request.max_tokens,
            chunk_size=request.chunk_size,
            want_token_matrix=request.debug_token_matrix)
        return EmbedResponse(chunk_vectors=result.chunk_vectors,
                             token_counts=result.token_counts,
                             model_id=app.state.engine.model_id,
                             debug_token_matrix=result.token_matrices)

    return app
