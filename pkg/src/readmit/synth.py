"""Synthetic admission/note tables for offline end-to-end runs.

Subjects get 1-3 admissions; a chosen set of non-final admissions is
readmitted within 30 days (the positives, exact count from the target
prevalence). Discharge texts share one fixed clinical skeleton and one
fixed filler-token bag (shuffled per document, so the bag of words is
constant), and each planted token appears in a positive text with
probability signal_strength versus 1 - signal_strength in negatives.
Planting is realized as exact per-label proportions, mirroring the
exact positive count, so a 0.5 signal carries no information at any
scale. Everything derives from one seeded generator: same seed, same
bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from .cohort import stratified_split_ids
from .errors import ConfigError

PLANTED_TOKENS = ("dialysis", "relapse", "chronic")
PLANTED_COPIES = 5

# Every document contains the skeleton verbatim, so these tokens carry
# no label signal; they exercise cleaning (brackets, titles, numbers,
# headers, negations) on realistic-looking text.
_SKELETON = (
    "Admission Date: [**2141-3-20**]\n"
    "Discharge Date: [**2141-3-27**]\n"
    "Service: MEDICINE\n"
    "Patient was admitted to the hospital with shortness of breath and "
    "chest pain. Seen by Dr. [**Last Name**]. History includes "
    "hypertension and diabetes mellitus. Exam without acute distress, "
    "lungs clear, no edema noted. Family history negative for early "
    "cardiac disease. Labs within normal limits. Started aspirin 81 mg "
    "daily and lisinopril 10 mg daily. Patient remained stable and was "
    "discharged home in improved condition with follow up arranged."
)

_FILLER_POOL = (
    "cough", "fever", "nausea", "dizziness", "fatigue", "anemia",
    "pneumonia", "cellulitis", "urinary", "infection", "oxygen",
    "saturation", "glucose", "insulin", "furosemide", "metoprolol",
    "warfarin", "heparin", "creatinine", "sodium", "potassium",
    "radiograph", "ultrasound", "echocardiogram", "physical", "therapy",
    "ambulating", "tolerating", "diet", "wound",
)
_EPOCH = datetime(2120, 1, 1)


@dataclass(frozen=True)
class SyntheticTables:
    admission_rows: list[dict]
    note_rows: list[dict]
    n_positive: int


def _timestamp(value: datetime) -> str:
    return value.strftime("%Y-%m-%d %H:%M:%S")


def _document_text(rng: np.random.Generator,
                   planted_flags: tuple[bool, ...]) -> str:
    order = rng.permutation(len(_FILLER_POOL))
    words = [_FILLER_POOL[i] for i in order]
    for token, present in zip(PLANTED_TOKENS, planted_flags):
        if present:
            words.extend([token] * PLANTED_COPIES)
    body = " ".join(words)
    return f"{_SKELETON}\nHospital course: {body}.\n"


def _planted_assignment(rng: np.random.Generator, n_docs: int,
                        cells: dict[tuple[int, str], list[int]],
                        signal_strength: float) -> list[tuple[bool, ...]]:
    """Which planted tokens each document carries.

    Within every (label, default-split) cell, each token is planted in
    exactly round(p * cell size) rows, where p is signal_strength for
    positives and its complement for negatives; the rows are chosen by
    seeded permutation. Cell-level balance keeps desk-scale splits at
    their expected planted proportions, so a 0.5 signal stays null even
    on a few hundred test rows.
    """
    flags = np.zeros((n_docs, len(PLANTED_TOKENS)), dtype=bool)
    for j in range(len(PLANTED_TOKENS)):
        for (label, _split), rows in sorted(cells.items()):
            p = signal_strength if label == 1 else 1.0 - signal_strength
            planted_count = int(round(p * len(rows)))
            order = rng.permutation(len(rows))
            for i in order[:planted_count]:
                flags[rows[i], j] = True
    return [tuple(row) for row in flags]


def generate(n_docs: int, prevalence: float, seed: int,
             signal_strength: float) -> SyntheticTables:
    """Build admission and note rows whose cohort has n_docs documents."""
    if not 0.0 < prevalence < 1.0:
        raise ConfigError(f"prevalence must be in (0, 1), "
                          f"got {prevalence}")
    if not 0.0 <= signal_strength <= 1.0:
        raise ConfigError(f"signal_strength must be in [0, 1], "
                          f"got {signal_strength}")
    if n_docs < 2:
        raise ConfigError(f"n_docs must be >= 2, got {n_docs}")
    rng = np.random.default_rng(seed)

    # Subject sizes: 1-3 admissions each, summing exactly to n_docs.
    sizes: list[int] = []
    remaining = n_docs
    while remaining > 0:
        size = min(int(rng.integers(1, 4)), remaining)
        sizes.append(size)
        remaining -= size

    # Positives must have a later admission, so only non-final rows of
    # each subject are eligible.
    eligible: list[int] = []
    row = 0
    for size in sizes:
        eligible.extend(range(row, row + size - 1))
        row += size
    n_positive = int(round(n_docs * prevalence))
    if n_positive > len(eligible):
        raise ConfigError(
            f"prevalence {prevalence} needs {n_positive} positives but "
            f"only {len(eligible)} rows can be readmitted")
    chosen = rng.choice(len(eligible), size=n_positive, replace=False)
    positive_rows = {eligible[i] for i in chosen}

    # Balance planting within the cells the default pipeline split will
    # form (ratios 0.7/0.15/0.15, split seed 0, hadm_ids assigned below
    # as 500000 + row).
    labels = [1 if r in positive_rows else 0 for r in range(n_docs)]
    assignment = stratified_split_ids(
        [500000 + r for r in range(n_docs)], labels,
        (0.70, 0.15, 0.15), seed=0)
    cells: dict[tuple[int, str], list[int]] = {}
    for r in range(n_docs):
        split = assignment.assignment[500000 + r]
        cells.setdefault((labels[r], split), []).append(r)
    planted = _planted_assignment(rng, n_docs, cells, signal_strength)

    admission_rows: list[dict] = []
    note_rows: list[dict] = []
    row = 0
    hadm_id = 500000
    for subject_index, size in enumerate(sizes):
        subject_id = 10000 + subject_index
        admit = _EPOCH + timedelta(days=float(rng.uniform(0, 3650)))
        for position in range(size):
            discharge = admit + timedelta(days=float(rng.uniform(2, 10)))
            positive = row in positive_rows
            admission_rows.append({
                "SUBJECT_ID": subject_id,
                "HADM_ID": hadm_id,
                "ADMITTIME": _timestamp(admit),
                "DISCHTIME": _timestamp(discharge),
                "DEATHTIME": "",
                "ADMISSION_TYPE": "EMERGENCY",
            })
            note_rows.append({
                "SUBJECT_ID": subject_id,
                "HADM_ID": hadm_id,
                "CATEGORY": "Discharge summary",
                "CHARTDATE": discharge.strftime("%Y-%m-%d"),
                "TEXT": _document_text(rng, planted[row]),
            })
            if positive:
                gap = float(rng.uniform(1.0, 29.0))
            else:
                gap = float(rng.uniform(35.0, 200.0))
            admit = discharge + timedelta(days=gap)
            hadm_id += 1
            row += 1

    _append_edge_cases(admission_rows, note_rows)
    return SyntheticTables(admission_rows=admission_rows,
                           note_rows=note_rows, n_positive=n_positive)


def _append_edge_cases(admission_rows: list[dict],
                       note_rows: list[dict]) -> None:
    """Rows the cohort filters must drop; they never change row counts."""
    admission_rows.append({
        "SUBJECT_ID": 99001, "HADM_ID": 990001,
        "ADMITTIME": "2140-01-01 08:00:00",
        "DISCHTIME": "2140-01-05 12:00:00",
        "DEATHTIME": "", "ADMISSION_TYPE": "NEWBORN",
    })
    note_rows.append({
        "SUBJECT_ID": 99001, "HADM_ID": 990001,
        "CATEGORY": "Discharge summary", "CHARTDATE": "2140-01-05",
        "TEXT": "Newborn summary text for a filtered admission.",
    })
    admission_rows.append({
        "SUBJECT_ID": 99002, "HADM_ID": 990002,
        "ADMITTIME": "2140-02-01 08:00:00",
        "DISCHTIME": "2140-02-09 12:00:00",
        "DEATHTIME": "2140-02-09 12:00:00", "ADMISSION_TYPE": "EMERGENCY",
    })
    note_rows.append({
        "SUBJECT_ID": 99002, "HADM_ID": 990002,
        "CATEGORY": "Discharge summary", "CHARTDATE": "2140-02-09",
        "TEXT": "Summary for an in-hospital death, filtered out.",
    })
    admission_rows.append({
        "SUBJECT_ID": 99003, "HADM_ID": 990003,
        "ADMITTIME": "2140-03-01 08:00:00",
        "DISCHTIME": "2140-03-04 12:00:00",
        "DEATHTIME": "", "ADMISSION_TYPE": "EMERGENCY",
    })
    note_rows.append({
        "SUBJECT_ID": 99003, "HADM_ID": 990003,
        "CATEGORY": "Nursing", "CHARTDATE": "2140-03-04",
        "TEXT": "Nursing note only; no discharge summary exists.",
    })
    admission_rows.append({
        "SUBJECT_ID": 99004, "HADM_ID": 990004,
        "ADMITTIME": "2140-04-01 08:00:00",
        "DISCHTIME": "2140-04-03 12:00:00",
        "DEATHTIME": "", "ADMISSION_TYPE": "EMERGENCY",
    })
    note_rows.append({
        "SUBJECT_ID": 99004, "HADM_ID": 990004,
        "CATEGORY": "Discharge summary", "CHARTDATE": "2140-04-03",
        "TEXT": "   ",
    })
    note_rows.append({
        "SUBJECT_ID": 99005, "HADM_ID": 990005,
        "CATEGORY": "Discharge summary", "CHARTDATE": "2140-05-01",
        "TEXT": "Orphan note whose admission does not exist.",
    })


def write_tables(tables: SyntheticTables, admissions_path,
                 notes_path) -> None:
    with open(admissions_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(
            f, fieldnames=["SUBJECT_ID", "HADM_ID", "ADMITTIME",
                           "DISCHTIME", "DEATHTIME", "ADMISSION_TYPE"],
            lineterminator="\n")
        writer.writeheader()
        writer.writerows(tables.admission_rows)
    with open(notes_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(
            f, fieldnames=["SUBJECT_ID", "HADM_ID", "CATEGORY",
                           "CHARTDATE", "TEXT"],
            lineterminator="\n")
        writer.writeheader()
        writer.writerows(tables.note_rows)
