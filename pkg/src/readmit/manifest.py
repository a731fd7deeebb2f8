"""Run manifests: the resolved configuration of every CLI stage.

Each stage writes `<out>.manifest.json` beside its primary output with
all defaults materialized, and any stage can replay from one via
`--config`; explicit flags override manifest values.
"""

from __future__ import annotations

import json

from .errors import InputDataError, SchemaError

MANIFEST_FORMAT_VERSION = 1


def manifest_path(output_path) -> str:
    return f"{output_path}.manifest.json"


def write_manifest(output_path, subcommand: str, config: dict) -> str:
    payload = {
        "format_version": MANIFEST_FORMAT_VERSION,
        "subcommand": subcommand,
        "config": config,
    }
    path = manifest_path(output_path)
    with open(path, "w", encoding="utf-8") as stream:
        json.dump(payload, stream, sort_keys=True, indent=2)
        stream.write("\n")
    return path


def read_manifest(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as stream:
            payload = json.load(stream)
    except FileNotFoundError as exc:
        raise InputDataError(f"manifest not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"manifest {path} is not valid JSON: "
                          f"{exc}") from exc
    if payload.get("format_version") != MANIFEST_FORMAT_VERSION:
        raise SchemaError(f"unsupported manifest version "
                          f"{payload.get('format_version')!r}")
    if not isinstance(payload.get("config"), dict):
        raise SchemaError(f"manifest {path} lacks a config object")
    return payload
