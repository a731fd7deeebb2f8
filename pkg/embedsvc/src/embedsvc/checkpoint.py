"""Checkpoint lifecycle: generate, hash, pin, and load.

The service only ever runs a checkpoint whose weights file hashes to a
pinned sha256; a mismatch refuses to load rather than silently serving
different vectors. `init_checkpoint` builds a small randomly
initialized single-layer BERT (hidden size 768, letter-piece
vocabulary) for offline use, seeded so regeneration is reproducible.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import BertConfig, BertModel, BertTokenizer
from transformers.utils import logging as hf_logging

from .errors import CheckpointError, CheckpointMismatchError

hf_logging.set_verbosity_error()
hf_logging.disable_progress_bar()

WEIGHTS_FILE = "model.safetensors"
PIN_FILE = "checkpoint.sha256"
HIDDEN_SIZE = 768
MAX_POSITIONS = 512

_SPECIALS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")


@dataclass(frozen=True)
class LoadedCheckpoint:
    tokenizer: BertTokenizer
    model: BertModel
    sha256: str


def checkpoint_hash(directory) -> str:
    """sha256 of the weights file, streamed in 1 MiB blocks."""
    path = Path(directory) / WEIGHTS_FILE
    if not path.is_file():
        raise CheckpointError(f"no weights file at {path}")
    digest = hashlib.sha256()
    with open(path, "rb") as stream:
        for block in iter(lambda: stream.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def pinned_hash(directory, explicit: str | None = None) -> str:
    """Resolve the pinned hash: explicit value, else the pin sidecar."""
    if explicit:
        return explicit.lower()
    pin = Path(directory) / PIN_FILE
    if pin.is_file():
        return pin.read_text(encoding="utf-8").strip().lower()
    raise CheckpointError(f"checkpoint {directory} has no pinned hash: "
                          f"pass one explicitly or provide {PIN_FILE}")


def init_checkpoint(directory, seed: int = 0) -> str:
    """Create the letter-piece tokenizer and a seeded random model.

    Returns the sha256 of the written weights and records it in the
    pin sidecar. The same seed always reproduces the same bytes.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    letters = [chr(c) for c in range(ord("a"), ord("z") + 1)]
    vocab = list(_SPECIALS) + letters + [f"##{c}" for c in letters]
    vocab_file = directory / "vocab.txt"
    vocab_file.write_text("\n".join(vocab) + "\n", encoding="utf-8")
    tokenizer = BertTokenizer(str(vocab_file), do_lower_case=True)
    tokenizer.save_pretrained(directory)

    config = BertConfig(vocab_size=len(vocab), hidden_size=HIDDEN_SIZE,
                        num_hidden_layers=1, num_attention_heads=12,
                        intermediate_size=128,
                        max_position_embeddings=MAX_POSITIONS,
                        type_vocab_size=2)
    torch.manual_seed(seed)
    model = BertModel(config, add_pooling_layer=False)
    model.save_pretrained(directory, safe_serialization=True)

    digest = checkpoint_hash(directory)
    (directory / PIN_FILE).write_text(digest + "\n", encoding="utf-8")
    return digest


def load_checkpoint(directory, expected_sha256: str) -> LoadedCheckpoint:
    """Load tokenizer and model after the weights hash matches the pin.

    Inference is pinned to one thread and eval mode so identical
    inputs produce identical bytes.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise CheckpointError(f"checkpoint directory {directory} "
                              f"does not exist")
    actual = checkpoint_hash(directory)
    if actual != expected_sha256.lower():
        raise CheckpointMismatchError(
            f"checkpoint {directory} hashes to {actual}, expected "
            f"{expected_sha256}; refusing to load")
    tokenizer = BertTokenizer.from_pretrained(directory)
    model = BertModel.from_pretrained(directory, add_pooling_layer=False)
    model.eval()
    torch.set_num_threads(1)
    return LoadedCheckpoint(tokenizer=tokenizer, model=model,
                            sha256=actual)
