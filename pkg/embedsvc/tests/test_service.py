"""Service-level contract tests over the HTTP layer."""

import hashlib

import pytest

from embedsvc import (CheckpointError, CheckpointMismatchError,
                      RequestError, ServiceSettings, checkpoint_hash,
                      create_app, init_checkpoint, load_checkpoint,
                      pinned_hash)
from embedsvc.checkpoint import WEIGHTS_FILE

# Letter-only words so the letter-piece vocabulary yields about seven
# tokens per word; 400 words comfortably exceed the 2040-token budget.
LONG_TEXT = " ".join("chronic" for _ in range(400))


class TestHealth:
    def test_ready_reports_pinned_hash(self, client, checkpoint_dir):
        _, digest = checkpoint_dir
        payload = client.get("/v1/health").json()
        assert payload["status"] == "ok"
        assert payload["model_id"]
        assert payload["checkpoint_hash"] == digest

    def test_loading_state_before_model_load(self, checkpoint_dir):
        from fastapi.testclient import TestClient

        directory, digest = checkpoint_dir
        settings = ServiceSettings(checkpoint_dir=str(directory),
                                   pinned_sha256=digest)
        app = create_app(settings, load=False)
        with TestClient(app) as client:
            health = client.get("/v1/health").json()
            assert health["status"] == "loading"
            assert health["checkpoint_hash"] == digest
            response = client.post("/v1/embed", json={"text": "chest pain"})
            assert response.status_code == 503
            body = response.json()
            assert set(body) == {"error", "detail"}
            app.state.load_engine()
            assert client.get("/v1/health").json()["status"] == "ok"
            assert client.post("/v1/embed",
                               json={"text": "chest pain"}).status_code == 200


class TestEmbedContract:
    def test_identical_text_is_bitwise_identical(self, client):
        body = {"text": "patient denies chest pain or dyspnea"}
        first = client.post("/v1/embed", json=body)
        second = client.post("/v1/embed", json=body)
        assert first.status_code == 200
        assert first.content == second.content

    @pytest.mark.parametrize("text", ["", "pain", LONG_TEXT])
    def test_dimensions_always_four_by_768(self, client, text):
        payload = client.post("/v1/embed", json={"text": text}).json()
        assert len(payload["chunk_vectors"]) == 4
        assert all(len(chunk) == 768 for chunk in payload["chunk_vectors"])
        assert len(payload["token_counts"]) == 4

    def test_empty_text_gives_zero_counts_and_vectors(self, client):
        payload = client.post("/v1/embed", json={"text": ""}).json()
        assert payload["token_counts"] == [0, 0, 0, 0]
        for chunk in payload["chunk_vectors"]:
            assert all(v == 0.0 for v in chunk)

    def test_zero_blocks_exactly_where_count_zero(self, client):
        payload = client.post("/v1/embed",
                              json={"text": "short note only"}).json()
        for count, chunk in zip(payload["token_counts"],
                                payload["chunk_vectors"]):
            assert (count == 0) == all(v == 0.0 for v in chunk)
        assert payload["token_counts"][0] > 0
        assert payload["token_counts"][3] == 0

    def test_long_text_truncates_to_budget(self, client):
        payload = client.post("/v1/embed", json={"text": LONG_TEXT}).json()
        # 510 content tokens per 512-position window
        assert payload["token_counts"] == [510, 510, 510, 510]
        assert sum(payload["token_counts"]) <= 2048

    def test_custom_chunk_size(self, client):
        payload = client.post("/v1/embed",
                              json={"text": LONG_TEXT, "max_tokens": 256,
                                    "chunk_size": 64}).json()
        assert payload["token_counts"] == [62, 62, 62, 62]
        assert all(len(c) == 768 for c in payload["chunk_vectors"])

    def test_model_id_in_response(self, client):
        payload = client.post("/v1/embed", json={"text": "pain"}).json()
        assert payload["model_id"] == "bdsbert-tiny"

    def test_oversized_text_is_413(self, client):
        response = client.post("/v1/embed",
                               json={"text": "a" * 1_100_000})
        assert response.status_code == 413
        body = response.json()
        assert body["error"] == "payload too large"
        assert "detail" in body

    def test_mismatched_chunking_is_422(self, client):
        response = client.post("/v1/embed",
                               json={"text": "x", "max_tokens": 2048,
                                     "chunk_size": 256})
        assert response.status_code == 422
        body = response.json()
        assert set(body) == {"error", "detail"}

    def test_debug_matrix_absent_by_default(self, client):
        payload = client.post("/v1/embed", json={"text": "pain"}).json()
        assert "debug_token_matrix" not in payload


class TestEngineValidation:
    def test_bad_pairing_rejected(self, engine):
        with pytest.raises(RequestError,
                           match="must equal max_tokens"):
            engine.embed_text("x", max_tokens=2048, chunk_size=100)

    def test_chunk_beyond_model_positions_rejected(self, engine):
        with pytest.raises(RequestError, match="positions"):
            engine.embed_text("x", max_tokens=4096, chunk_size=1024)


class TestCheckpoint:
    def test_hash_matches_independent_digest(self, checkpoint_dir):
        directory, digest = checkpoint_dir
        oracle = hashlib.sha256(
            (directory / WEIGHTS_FILE).read_bytes()).hexdigest()
        assert checkpoint_hash(directory) == oracle == digest

    def test_same_seed_reproduces_hash(self, checkpoint_dir, tmp_path):
        _, digest = checkpoint_dir
        assert init_checkpoint(tmp_path / "again", seed=0) == digest

    def test_different_seed_changes_hash(self, checkpoint_dir, tmp_path):
        _, digest = checkpoint_dir
        assert init_checkpoint(tmp_path / "other", seed=1) != digest

    def test_wrong_pin_refuses_to_load(self, checkpoint_dir):
        directory, _ = checkpoint_dir
        with pytest.raises(CheckpointMismatchError, match="refusing"):
            load_checkpoint(directory, "0" * 64)

    def test_pin_resolution(self, checkpoint_dir, tmp_path):
        directory, digest = checkpoint_dir
        assert pinned_hash(directory) == digest
        assert pinned_hash(directory, "ABC123") == "abc123"
        with pytest.raises(CheckpointError, match="no pinned hash"):
            pinned_hash(tmp_path)

    def test_missing_weights_rejected(self, tmp_path):
        with pytest.raises(CheckpointError, match="no weights file"):
            checkpoint_hash(tmp_path)
