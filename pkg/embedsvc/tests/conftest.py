"""Shared fixtures: one generated checkpoint and engine per session."""

import pytest

from embedsvc import (EmbedEngine, ServiceSettings, create_app,
                      init_checkpoint, load_checkpoint)

MODEL_ID = "bdsbert-tiny"


@pytest.fixture(scope="session")
def checkpoint_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("checkpoint")
    digest = init_checkpoint(directory, seed=0)
    return directory, digest


@pytest.fixture(scope="session")
def engine(checkpoint_dir):
    directory, digest = checkpoint_dir
    return EmbedEngine(load_checkpoint(directory, digest), MODEL_ID)


@pytest.fixture(scope="session")
def app(checkpoint_dir):
    directory, digest = checkpoint_dir
    settings = ServiceSettings(checkpoint_dir=str(directory),
                               pinned_sha256=digest, model_id=MODEL_ID)
    return create_app(settings)


@pytest.fixture(scope="session")
def client(app):
    from fastapi.testclient import TestClient

    with TestClient(app) as test_client:
        yield test_client
