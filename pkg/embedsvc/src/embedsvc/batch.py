"""File-to-file embedding with resume support.

Reads a cleaned-cohort CSV (HADM_ID and CLEAN_TEXT columns), embeds
each row in input order, and writes HADM_ID plus 3072 full-precision
columns, the format the prediction pipeline's embedding reader
expects. A progress sidecar records how many input rows have been
consumed; `resume=True` continues from it after an interruption and
appends without duplicating rows. Malformed rows are skipped and
logged with their row number.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .engine import (DEFAULT_CHUNK_SIZE, DEFAULT_MAX_TOKENS, EMBED_DIM,
                     CHUNK_COUNT, EmbedEngine)
from .errors import BatchError

logger = logging.getLogger(__name__)

PROGRESS_SUFFIX = ".progress.json"
OUTPUT_HEADER = ["HADM_ID"] + [f"E{i:04d}"
                               for i in range(CHUNK_COUNT * EMBED_DIM)]


@dataclass(frozen=True)
class BatchSummary:
    written: int
    skipped: int
    resumed_from: int


def progress_path(out_path) -> str:
    return f"{out_path}{PROGRESS_SUFFIX}"


def _read_input(in_path) -> list[dict]:
    try:
        stream = open(in_path, "r", encoding="utf-8", newline="")
    except FileNotFoundError as exc:
        raise BatchError(f"input file not found: {in_path}") from exc
    with stream:
        reader = csv.DictReader(stream)
        fields = set(reader.fieldnames or ())
        missing = {"HADM_ID", "CLEAN_TEXT"} - fields
        if missing:
            raise BatchError(f"input {in_path} lacks columns "
                             f"{sorted(missing)}")
        return list(reader)


def _resume_point(out_path, resume: bool) -> int:
    sidecar = Path(progress_path(out_path))
    if not resume:
        return 0
    if sidecar.is_file():
        payload = json.loads(sidecar.read_text(encoding="utf-8"))
        return int(payload["rows_done"])
    if Path(out_path).is_file():
        # No sidecar and an output present: the previous run finished
        return -1
    return 0


def embed_file(engine: EmbedEngine, in_path, out_path,
               resume: bool = False,
               max_tokens: int = DEFAULT_MAX_TOKENS,
               chunk_size: int = DEFAULT_CHUNK_SIZE) -> BatchSummary:
    rows = _read_input(in_path)
    start = _resume_point(out_path, resume)
    if start == -1:
        logger.info("output %s is already complete; nothing to do",
                    out_path)
        return BatchSummary(written=0, skipped=0, resumed_from=0)

    sidecar = Path(progress_path(out_path))
    mode = "a" if start > 0 else "w"
    written = skipped = 0
    with open(out_path, mode, encoding="utf-8", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        if start == 0:
            writer.writerow(OUTPUT_HEADER)
        for row_number, row in enumerate(rows, start=1):
            if row_number <= start:
                continue
            try:
                hadm_id = int(row["HADM_ID"])
                text = row["CLEAN_TEXT"]
                if text is None:
                    raise ValueError("row is short of columns")
            except (TypeError, ValueError) as exc:
                logger.warning("skipping row %d: %s", row_number, exc)
                skipped += 1
            else:
                result = engine.embed_text(text, max_tokens=max_tokens,
                                           chunk_size=chunk_size)
                writer.writerow([hadm_id] + [repr(float(v))
                                             for v in result.flat_vector])
                written += 1
            stream.flush()
            sidecar.write_text(json.dumps({"rows_done": row_number})
                               + "\n", encoding="utf-8")
    sidecar.unlink(missing_ok=True)
    return BatchSummary(written=written, skipped=skipped,
                        resumed_from=start)
