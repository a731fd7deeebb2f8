"""Batch mode: output format, resume semantics, and the CLI."""

import csv
import logging

import numpy as np
import pytest

from embedsvc import BatchError, embed_file, progress_path
from embedsvc.cli import main

TEXTS = [
    "patient admitted with chest pain",
    "",
    "discharged home in stable condition",
    "followup scheduled in two weeks",
    "denies fever chills or night sweats",
    "history of chronic kidney disease",
    "wound healing well without erythema",
    "continue home medications as prescribed",
    "no acute events overnight",
    "tolerating regular diet at discharge",
]


def _write_cleaned(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as stream:
        writer = csv.DictWriter(stream,
                                fieldnames=["HADM_ID", "LABEL",
                                            "CLEAN_TEXT"],
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


@pytest.fixture()
def cleaned_csv(tmp_path):
    path = tmp_path / "cleaned.csv"
    _write_cleaned(path, [{"HADM_ID": 500 + i, "LABEL": i % 2,
                           "CLEAN_TEXT": text}
                          for i, text in enumerate(TEXTS)])
    return path


class _Interrupter:
    """Engine wrapper that raises after a set number of embeddings."""

    def __init__(self, inner, fail_after):
        self._inner = inner
        self._remaining = fail_after

    def embed_text(self, *args, **kwargs):
        if self._remaining == 0:
            raise RuntimeError("simulated crash")
        self._remaining -= 1
        return self._inner.embed_text(*args, **kwargs)


class TestEmbedFile:
    def test_output_readable_by_pipeline(self, engine, cleaned_csv,
                                         tmp_path):
        from readmit.features.embed import read_embeddings

        out = tmp_path / "embeddings.csv"
        summary = embed_file(engine, cleaned_csv, out)
        assert summary.written == 10
        assert summary.skipped == 0
        rows = read_embeddings(out)
        assert [r.hadm_id for r in rows] == [500 + i for i in range(10)]
        assert all(r.vector.shape == (3072,) for r in rows)

    def test_values_match_engine_exactly(self, engine, cleaned_csv,
                                         tmp_path):
        from readmit.features.embed import read_embeddings

        out = tmp_path / "embeddings.csv"
        embed_file(engine, cleaned_csv, out)
        rows = {r.hadm_id: r.vector for r in read_embeddings(out)}
        expected = engine.embed_text(TEXTS[0]).flat_vector
        np.testing.assert_array_equal(rows[500], np.asarray(expected))

    def test_empty_text_emits_zero_vector(self, engine, cleaned_csv,
                                          tmp_path):
        from readmit.features.embed import read_embeddings

        out = tmp_path / "embeddings.csv"
        embed_file(engine, cleaned_csv, out)
        rows = {r.hadm_id: r.vector for r in read_embeddings(out)}
        assert np.all(rows[501] == 0.0)
        assert np.any(rows[502] != 0.0)

    def test_malformed_row_skipped_and_logged(self, engine, tmp_path,
                                              caplog):
        path = tmp_path / "cleaned.csv"
        rows = [{"HADM_ID": 1, "LABEL": 0, "CLEAN_TEXT": "one"},
                {"HADM_ID": "bad", "LABEL": 0, "CLEAN_TEXT": "two"},
                {"HADM_ID": 3, "LABEL": 1, "CLEAN_TEXT": "three"}]
        _write_cleaned(path, rows)
        out = tmp_path / "embeddings.csv"
        with caplog.at_level(logging.WARNING, logger="embedsvc.batch"):
            summary = embed_file(engine, path, out)
        assert summary.written == 2
        assert summary.skipped == 1
        assert any("row 2" in record.getMessage()
                   for record in caplog.records)

    def test_missing_columns_rejected(self, engine, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("HADM_ID,TEXT\n1,hello\n", encoding="utf-8")
        with pytest.raises(BatchError, match="CLEAN_TEXT"):
            embed_file(engine, path, tmp_path / "out.csv")

    def test_missing_input_rejected(self, engine, tmp_path):
        with pytest.raises(BatchError, match="not found"):
            embed_file(engine, tmp_path / "ghost.csv",
                       tmp_path / "out.csv")


class TestResume:
    def test_interrupted_run_resumes_without_duplicates(
            self, engine, cleaned_csv, tmp_path):
        reference = tmp_path / "reference.csv"
        embed_file(engine, cleaned_csv, reference)

        out = tmp_path / "resumed.csv"
        with pytest.raises(RuntimeError, match="simulated crash"):
            embed_file(_Interrupter(engine, 5), cleaned_csv, out)
        sidecar = progress_path(out)
        import json

        assert json.loads(open(sidecar).read())["rows_done"] == 5

        summary = embed_file(engine, cleaned_csv, out, resume=True)
        assert summary.resumed_from == 5
        assert summary.written == 5
        assert out.read_bytes() == reference.read_bytes()
        import os

        assert not os.path.exists(sidecar)

    def test_resume_on_complete_output_is_noop(self, engine,
                                               cleaned_csv, tmp_path):
        out = tmp_path / "done.csv"
        embed_file(engine, cleaned_csv, out)
        before = out.read_bytes()
        summary = embed_file(engine, cleaned_csv, out, resume=True)
        assert summary.written == 0
        assert out.read_bytes() == before

    def test_fresh_run_overwrites(self, engine, cleaned_csv, tmp_path):
        out = tmp_path / "fresh.csv"
        embed_file(engine, cleaned_csv, out)
        first = out.read_bytes()
        embed_file(engine, cleaned_csv, out)
        assert out.read_bytes() == first


class TestCli:
    def test_init_and_batch_roundtrip(self, checkpoint_dir, cleaned_csv,
                                      tmp_path, capsys):
        directory, _ = checkpoint_dir
        out = tmp_path / "embeddings.csv"
        code = main(["batch", "--in", str(cleaned_csv),
                     "--out", str(out), "--checkpoint", str(directory)])
        assert code == 0
        assert "10 rows embedded" in capsys.readouterr().out
        assert out.exists()

    def test_init_checkpoint_command(self, tmp_path, capsys):
        code = main(["init-checkpoint", "--out",
                     str(tmp_path / "ck"), "--seed", "0"])
        assert code == 0
        assert "sha256" in capsys.readouterr().out

    def test_bad_pin_exits_nonzero(self, checkpoint_dir, cleaned_csv,
                                   tmp_path, capsys):
        directory, _ = checkpoint_dir
        code = main(["batch", "--in", str(cleaned_csv),
                     "--out", str(tmp_path / "x.csv"),
                     "--checkpoint", str(directory),
                     "--sha256", "0" * 64])
        assert code == 1
        assert "refusing" in capsys.readouterr().err
