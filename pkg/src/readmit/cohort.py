"""Cohort construction from admission and note tables.

Reads the two source CSVs (admissions, notes), derives each admission's
next-admission fields, attaches the <30-day readmission label, merges
discharge-summary text, and produces deterministic stratified splits.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from .errors import ConfigError, SchemaError

logger = logging.getLogger(__name__)

TIMESTAMP_FORMAT = "%Y-%m-%d %H:%M:%S"
DATE_FORMAT = "%Y-%m-%d"
SECONDS_PER_DAY = 86400.0

ADMISSION_TYPES = frozenset({"ELECTIVE", "EMERGENCY", "URGENT", "NEWBORN"})
READMISSION_WINDOW_DAYS = 30.0

# Next-admission policies: skip planned (elective) returns when looking for
# the successor, or keep only rows whose own admission is elective.
SKIP_NEXT_ELECTIVE = "skip-next-elective"
KEEP_CURRENT_ELECTIVE_ONLY = "keep-current-elective-only"
ELECTIVE_POLICIES = (SKIP_NEXT_ELECTIVE, KEEP_CURRENT_ELECTIVE_ONLY)

TRAIN = "TRAIN"
VAL = "VAL"
TEST = "TEST"
SPLIT_NAMES = (TRAIN, VAL, TEST)

ADMISSIONS_COLUMNS = ("SUBJECT_ID", "HADM_ID", "ADMITTIME", "DISCHTIME",
                      "DEATHTIME", "ADMISSION_TYPE")
NOTES_COLUMNS = ("SUBJECT_ID", "HADM_ID", "CATEGORY", "CHARTDATE", "TEXT")
COHORT_COLUMNS = ("SUBJECT_ID", "HADM_ID", "ADMITTIME", "DISCHTIME",
                  "ADMISSION_TYPE", "NEXT_ADMITTIME", "NEXT_ADMISSION_TYPE",
                  "DAYS_NEXT_ADMIT", "LABEL", "TEXT")
REJECTS_COLUMNS = ("SOURCE", "LINE_NUMBER", "REASON")

DISCHARGE_SUMMARY_CATEGORY = "discharge summary"


@dataclass(frozen=True)
class AdmissionRecord:
    subject_id: int
    hadm_id: int
    admit_time: datetime
    discharge_time: datetime
    death_time: datetime | None
    admission_type: str
    line_number: int = 0


@dataclass(frozen=True)
class NoteRecord:
    subject_id: int
    hadm_id: int
    category: str
    chart_time: datetime | None
    text: str
    line_number: int = 0


@dataclass(frozen=True)
class AnnotatedAdmission:
    """An admission plus its subject's next-admission fields."""

    subject_id: int
    hadm_id: int
    admit_time: datetime
    discharge_time: datetime
    admission_type: str
    next_admit_time: datetime | None
    next_admission_type: str | None


@dataclass(frozen=True)
class CohortRow:
    subject_id: int
    hadm_id: int
    admit_time: datetime
    discharge_time: datetime
    admission_type: str
    next_admit_time: datetime | None
    next_admission_type: str | None
    days_to_next: float | None
    label: int
    text: str


@dataclass(frozen=True)
class Reject:
    source: str
    line_number: int
    reason: str


@dataclass
class IngestResult:
    admissions: list[AdmissionRecord]
    notes: list[NoteRecord]
    rejects: list[Reject] = field(default_factory=list)


@dataclass(frozen=True)
class SplitAssignment:
    seed: int
    ratios: tuple[float, float, float]
    assignment: dict[int, str]

    def ids_for(self, split: str) -> list[int]:
        return [h for h, s in self.assignment.items() if s == split]


def _parse_timestamp(value: str) -> datetime | None:
    """Parse a source timestamp; empty string means absent.

    CHARTDATE carries dates without a time component, so a bare date is
    accepted as midnight.
    """
    value = value.strip()
    if not value:
        return None
    for fmt in (TIMESTAMP_FORMAT, DATE_FORMAT):
        try:
            return datetime.strptime(value, fmt)
        except ValueError:
            continue
    raise ValueError(f"unparseable timestamp {value!r}")


def _open_source(source):
    """Accept a path or an open text stream; returns (file, should_close)."""
    if hasattr(source, "read"):
        return source, False
    return open(source, "r", encoding="utf-8", newline=""), True


def _check_header(fieldnames, required, source_name: str) -> None:
    present = set(fieldnames or ())
    for column in required:
        if column not in present:
            raise SchemaError(f"{source_name}: missing required column {column}")


def read_admissions(source) -> tuple[list[AdmissionRecord], list[Reject]]:
    """Parse the admissions CSV; malformed rows go to the rejects list."""
    stream, should_close = _open_source(source)
    records: list[AdmissionRecord] = []
    rejects: list[Reject] = []
    seen_hadm: set[int] = set()
    try:
        reader = csv.DictReader(stream)
        _check_header(reader.fieldnames, ADMISSIONS_COLUMNS, "admissions")
        for row in reader:
            line = reader.line_num
            try:
                subject_id = int(row["SUBJECT_ID"])
                hadm_id = int(row["HADM_ID"])
                admit_time = _parse_timestamp(row["ADMITTIME"])
                discharge_time = _parse_timestamp(row["DISCHTIME"])
                death_time = _parse_timestamp(row["DEATHTIME"])
            except (TypeError, ValueError) as exc:
                rejects.append(Reject("admissions", line, str(exc)))
                continue
            admission_type = (row["ADMISSION_TYPE"] or "").strip().upper()
            if admission_type not in ADMISSION_TYPES:
                rejects.append(Reject("admissions", line,
                                      f"unknown admission type {admission_type!r}"))
                continue
            if admit_time is None or discharge_time is None:
                rejects.append(Reject("admissions", line,
                                      "missing admit or discharge time"))
                continue
            if admit_time > discharge_time:
                rejects.append(Reject("admissions", line,
                                      "discharge precedes admission"))
                continue
            if hadm_id in seen_hadm:
                rejects.append(Reject("admissions", line,
                                      f"duplicate hadm_id {hadm_id}"))
                continue
            seen_hadm.add(hadm_id)
            records.append(AdmissionRecord(subject_id, hadm_id, admit_time,
                                           discharge_time, death_time,
                                           admission_type, line))
    finally:
        if should_close:
            stream.close()
    return records, rejects


def read_notes(source) -> tuple[list[NoteRecord], list[Reject]]:
    """Parse the notes CSV, keeping discharge summaries with non-empty text.

    Category matching is case-insensitive after trimming. Rows of other
    categories and rows with blank text are silently excluded; only
    malformed rows are recorded as rejects.
    """
    stream, should_close = _open_source(source)
    records: list[NoteRecord] = []
    rejects: list[Reject] = []
    try:
        reader = csv.DictReader(stream)
        _check_header(reader.fieldnames, NOTES_COLUMNS, "notes")
        for row in reader:
            line = reader.line_num
            category = (row["CATEGORY"] or "").strip()
            if category.lower() != DISCHARGE_SUMMARY_CATEGORY:
                continue
            text = row["TEXT"] or ""
            if not text.strip():
                continue
            try:
                subject_id = int(row["SUBJECT_ID"])
                hadm_id = int(row["HADM_ID"])
                chart_time = _parse_timestamp(row["CHARTDATE"])
            except (TypeError, ValueError) as exc:
                rejects.append(Reject("notes", line, str(exc)))
                continue
            records.append(NoteRecord(subject_id, hadm_id, category,
                                      chart_time, text, line))
    finally:
        if should_close:
            stream.close()
    return records, rejects


def ingest_tables(admissions_source, notes_source) -> IngestResult:
    """Read both source tables, accumulating per-row rejects."""
    admissions, adm_rejects = read_admissions(admissions_source)
    notes, note_rejects = read_notes(notes_source)
    return IngestResult(admissions, notes, adm_rejects + note_rejects)


def filter_admissions(records: list[AdmissionRecord]) -> list[AdmissionRecord]:
    """Drop newborn admissions and admissions that ended in death."""
    return [r for r in records
            if r.admission_type != "NEWBORN" and r.death_time is None]


def derive_next_admission(records: list[AdmissionRecord],
                          policy: str = SKIP_NEXT_ELECTIVE,
                          ) -> list[AnnotatedAdmission]:
    """Annotate each admission with its subject's next admission.

    Admissions are ordered per subject by admit time (ties broken by
    hadm_id, with a warning). Under ``skip-next-elective`` an ELECTIVE
    successor is skipped in favor of the following non-elective admission,
    treating planned returns as non-events. Under
    ``keep-current-elective-only`` the immediate successor is used and only
    rows whose own admission is ELECTIVE are retained.
    """
    if policy not in ELECTIVE_POLICIES:
        raise ConfigError(f"unknown elective policy {policy!r}")

    by_subject: dict[int, list[AdmissionRecord]] = {}
    for record in records:
        by_subject.setdefault(record.subject_id, []).append(record)

    annotated: list[AnnotatedAdmission] = []
    for subject_id in sorted(by_subject):
        chronological = sorted(by_subject[subject_id],
                               key=lambda r: (r.admit_time, r.hadm_id))
        times = [r.admit_time for r in chronological]
        if len(set(times)) != len(times):
            logger.warning("subject %d has admissions with identical admit "
                           "times; tie broken by hadm_id", subject_id)
        for i, record in enumerate(chronological):
            successor = None
            for candidate in chronological[i + 1:]:
                if policy == SKIP_NEXT_ELECTIVE and \
                        candidate.admission_type == "ELECTIVE":
                    continue
                successor = candidate
                break
            annotated.append(AnnotatedAdmission(
                subject_id=record.subject_id,
                hadm_id=record.hadm_id,
                admit_time=record.admit_time,
                discharge_time=record.discharge_time,
                admission_type=record.admission_type,
                next_admit_time=successor.admit_time if successor else None,
                next_admission_type=successor.admission_type if successor else None,
            ))

    if policy == KEEP_CURRENT_ELECTIVE_ONLY:
        annotated = [a for a in annotated if a.admission_type == "ELECTIVE"]

    # Restore source order: the per-subject pass above regrouped rows.
    order = {r.hadm_id: i for i, r in enumerate(records)}
    annotated.sort(key=lambda a: order[a.hadm_id])
    return annotated


def compute_label(row: AnnotatedAdmission) -> tuple[float | None, int]:
    """Days from discharge to the next admission, and the <30-day label.

    A next admission that starts before this discharge (overlapping stays
    occur in real data) clamps to zero days and labels positive.
    """
    if row.next_admit_time is None:
        return None, 0
    days = (row.next_admit_time - row.discharge_time).total_seconds() / SECONDS_PER_DAY
    if days < 0.0:
        logger.warning("hadm_id %d: next admission precedes discharge; "
                       "clamping gap to 0 days", row.hadm_id)
        days = 0.0
    label = 1 if days < READMISSION_WINDOW_DAYS else 0
    return days, label


def merge_notes(admissions: list[AnnotatedAdmission],
                notes: list[NoteRecord],
                ) -> tuple[list[CohortRow], list[Reject]]:
    """Inner-join admissions with their discharge summaries on hadm_id.

    Multiple summaries for one admission are concatenated in chart-time
    order (absent chart times last, then input order), newline separated.
    Admissions without any summary are dropped; notes without a matching
    admission are returned as rejects.
    """
    known = {a.hadm_id for a in admissions}
    grouped: dict[int, list[tuple[int, NoteRecord]]] = {}
    rejects: list[Reject] = []
    for position, note in enumerate(notes):
        if note.hadm_id not in known:
            rejects.append(Reject("notes", note.line_number,
                                  f"no admission for hadm_id {note.hadm_id}"))
            continue
        grouped.setdefault(note.hadm_id, []).append((position, note))

    rows: list[CohortRow] = []
    for admission in admissions:
        entries = grouped.get(admission.hadm_id)
        if not entries:
            continue
        entries.sort(key=lambda item: (item[1].chart_time is None,
                                       item[1].chart_time or datetime.min,
                                       item[0]))
        text = "\n".join(note.text for _, note in entries)
        days, label = compute_label(admission)
        rows.append(CohortRow(
            subject_id=admission.subject_id,
            hadm_id=admission.hadm_id,
            admit_time=admission.admit_time,
            discharge_time=admission.discharge_time,
            admission_type=admission.admission_type,
            next_admit_time=admission.next_admit_time,
            next_admission_type=admission.next_admission_type,
            days_to_next=days,
            label=label,
            text=text,
        ))
    return rows, rejects


def build_cohort(admissions_source, notes_source,
                 policy: str = SKIP_NEXT_ELECTIVE,
                 ) -> tuple[list[CohortRow], list[Reject]]:
    """Full cohort stage: ingest, filter, annotate, label, merge."""
    ingest = ingest_tables(admissions_source, notes_source)
    filtered = filter_admissions(ingest.admissions)
    annotated = derive_next_admission(filtered, policy=policy)
    rows, orphan_rejects = merge_notes(annotated, ingest.notes)
    return rows, ingest.rejects + orphan_rejects


def _largest_remainder_sizes(n: int, ratios: tuple[float, ...]) -> list[int]:
    """Integer split sizes summing to n; ties go to the earlier split."""
    exact = [r * n for r in ratios]
    base = [math.floor(e) for e in exact]
    remainder = n - sum(base)
    by_fraction = sorted(range(len(ratios)),
                         key=lambda i: (-(exact[i] - base[i]), i))
    for i in by_fraction[:remainder]:
        base[i] += 1
    return base


def stratified_split_ids(hadm_ids: list[int], labels: list[int],
                         ratios: tuple[float, float, float],
                         seed: int) -> SplitAssignment:
    """Deterministic stratified split of hadm_ids by label.

    Strata are sorted by hadm_id before the seeded shuffle, so the
    assignment does not depend on input row order. A stratum with fewer
    rows than splits goes entirely to TRAIN.
    """
    if len(hadm_ids) != len(labels):
        raise ConfigError("hadm_ids and labels must have equal length")
    if not hadm_ids:
        raise ConfigError("cannot split an empty cohort")
    if any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"ratios must be positive and sum to 1, got {ratios}")

    strata: dict[int, list[int]] = {}
    for hadm_id, label in zip(hadm_ids, labels):
        strata.setdefault(label, []).append(hadm_id)

    assignment: dict[int, str] = {}
    for label in sorted(strata):
        ids = sorted(strata[label])
        if len(ids) < len(SPLIT_NAMES):
            logger.warning("label-%d stratum has only %d rows; assigning all "
                           "to TRAIN", label, len(ids))
            for hadm_id in ids:
                assignment[hadm_id] = TRAIN
            continue
        rng = np.random.default_rng(seed)
        order = rng.permutation(len(ids))
        shuffled = [ids[i] for i in order]
        sizes = _largest_remainder_sizes(len(ids), ratios)
        start = 0
        for split, size in zip(SPLIT_NAMES, sizes):
            for hadm_id in shuffled[start:start + size]:
                assignment[hadm_id] = split
            start += size
    return SplitAssignment(seed=seed, ratios=tuple(ratios), assignment=assignment)


def stratified_split(rows: list[CohortRow],
                     ratios: tuple[float, float, float] = (0.70, 0.15, 0.15),
                     seed: int = 0) -> SplitAssignment:
    return stratified_split_ids([r.hadm_id for r in rows],
                                [r.label for r in rows], ratios, seed)


def _format_timestamp(value: datetime | None) -> str:
    return "" if value is None else value.strftime(TIMESTAMP_FORMAT)


def write_cohort_csv(rows: list[CohortRow], destination) -> None:
    stream, should_close = _open_writable(destination)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(COHORT_COLUMNS)
        for row in rows:
            writer.writerow([
                row.subject_id,
                row.hadm_id,
                _format_timestamp(row.admit_time),
                _format_timestamp(row.discharge_time),
                row.admission_type,
                _format_timestamp(row.next_admit_time),
                row.next_admission_type or "",
                "" if row.days_to_next is None else repr(row.days_to_next),
                row.label,
                row.text,
            ])
    finally:
        if should_close:
            stream.close()


def read_cohort_csv(source) -> list[CohortRow]:
    stream, should_close = _open_source(source)
    try:
        reader = csv.DictReader(stream)
        _check_header(reader.fieldnames, COHORT_COLUMNS, "cohort")
        rows = []
        for row in reader:
            rows.append(CohortRow(
                subject_id=int(row["SUBJECT_ID"]),
                hadm_id=int(row["HADM_ID"]),
                admit_time=_parse_timestamp(row["ADMITTIME"]),
                discharge_time=_parse_timestamp(row["DISCHTIME"]),
                admission_type=row["ADMISSION_TYPE"],
                next_admit_time=_parse_timestamp(row["NEXT_ADMITTIME"]),
                next_admission_type=row["NEXT_ADMISSION_TYPE"] or None,
                days_to_next=(float(row["DAYS_NEXT_ADMIT"])
                              if row["DAYS_NEXT_ADMIT"] else None),
                label=int(row["LABEL"]),
                text=row["TEXT"],
            ))
        return rows
    finally:
        if should_close:
            stream.close()


def write_rejects_csv(rejects: list[Reject], destination) -> None:
    stream, should_close = _open_writable(destination)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(REJECTS_COLUMNS)
        for reject in rejects:
            writer.writerow([reject.source, reject.line_number, reject.reason])
    finally:
        if should_close:
            stream.close()


def _open_writable(destination):
    if hasattr(destination, "write"):
        return destination, False
    return open(destination, "w", encoding="utf-8", newline=""), True
