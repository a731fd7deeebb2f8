"""Binary-classification evaluation: confusion metrics, ROC, AUC.

Metrics are reported in three averaging modes (binary, macro, weighted).
Division by zero yields 0 with an explicit undefined flag instead of an
error, so heavily imbalanced test sets never crash a report. Weighted
recall equals accuracy by algebraic identity.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, InputDataError

REPORT_FORMAT_VERSION = 1
AVERAGING_MODES = ("binary", "macro", "weighted")
ROC_HEADER = ("THRESHOLD", "FPR", "TPR")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ModeMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MetricsReport:
    counts: ConfusionCounts
    binary: ModeMetrics
    macro: ModeMetrics
    weighted: ModeMetrics
    undefined_flags: frozenset[tuple[str, str]]

    def for_mode(self, mode: str) -> ModeMetrics:
        if mode not in AVERAGING_MODES:
            raise ConfigError(f"unknown averaging mode {mode!r}")
        return getattr(self, mode)


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]
    thresholds: tuple[float, ...]


def _validate_pair(labels, values, name: str) -> tuple[np.ndarray,
                                                       np.ndarray]:
    labels = np.asarray(labels)
    values = np.asarray(values)
    if labels.shape != values.shape or labels.ndim != 1:
        raise DimensionError(f"labels {labels.shape} and {name} "
                             f"{values.shape} must be equal-length 1-D")
    if not np.all(np.isin(labels, (0, 1))):
        raise ConfigError("labels must be binary 0/1")
    return labels.astype(int), values


def confusion(labels, predictions) -> ConfusionCounts:
    labels, predictions = _validate_pair(labels, predictions,
                                         "predictions")
    if not np.all(np.isin(predictions, (0, 1))):
        raise ConfigError("predictions must be binary 0/1")
    predictions = predictions.astype(int)
    tp = int(np.sum((labels == 1) & (predictions == 1)))
    fp = int(np.sum((labels == 0) & (predictions == 1)))
    tn = int(np.sum((labels == 0) & (predictions == 0)))
    fn = int(np.sum((labels == 1) & (predictions == 0)))
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def _ratio(numerator: int, denominator: int,
           flags: set, flag_key: tuple[str, str]) -> float:
    if denominator == 0:
        flags.add(flag_key)
        return 0.0
    return numerator / denominator


def metrics(labels, predictions, mode: str = "weighted") -> MetricsReport:
    """Accuracy, precision, recall, F1 in every averaging mode.

    The mode argument is validated for the caller's benefit; the report
    always carries all three modes.
    """
    if mode not in AVERAGING_MODES:
        raise ConfigError(f"unknown averaging mode {mode!r}")
    counts = confusion(labels, predictions)
    flags: set[tuple[str, str]] = set()
    n = counts.total
    accuracy = (counts.tp + counts.tn) / n if n else 0.0

    # Per-class precision/recall/F1: class 1 from the counts as-is,
    # class 0 with roles swapped.
    per_class = {}
    for cls, (tp, fp, fn) in {1: (counts.tp, counts.fp, counts.fn),
                              0: (counts.tn, counts.fn, counts.fp)}.items():
        precision = _ratio(tp, tp + fp, flags, ("precision", f"class{cls}"))
        recall = _ratio(tp, tp + fn, flags, ("recall", f"class{cls}"))
        if precision + recall == 0.0:
            flags.add(("f1", f"class{cls}"))
            f1 = 0.0
        else:
            f1 = 2.0 * precision * recall / (precision + recall)
        per_class[cls] = (precision, recall, f1)

    support = {1: counts.tp + counts.fn, 0: counts.tn + counts.fp}
    binary = ModeMetrics(accuracy, *per_class[1])
    macro = ModeMetrics(accuracy,
                        *[(per_class[0][i] + per_class[1][i]) / 2.0
                          for i in range(3)])
    weighted_values = [(support[0] * per_class[0][i]
                        + support[1] * per_class[1][i]) / n
                       for i in range(3)]
    # Support-weighted recall is algebraically (tp + tn) / n; use the
    # identity so equality with accuracy holds bit for bit.
    weighted_values[1] = accuracy
    weighted = ModeMetrics(accuracy, *weighted_values)

    # Surface per-class zero divisions as per-mode flags.
    mode_flags: set[tuple[str, str]] = set()
    for metric_name, cls_flag in flags:
        if cls_flag == "class1":
            mode_flags.add((metric_name, "binary"))
        mode_flags.add((metric_name, "macro"))
        mode_flags.add((metric_name, "weighted"))
    return MetricsReport(counts=counts, binary=binary, macro=macro,
                         weighted=weighted,
                         undefined_flags=frozenset(mode_flags))


def roc_curve(labels, scores) -> RocCurve:
    """Tie-grouped ROC from (0, 0) to (1, 1), thresholds leading with inf."""
    labels, scores = _validate_pair(labels, scores, "scores")
    if not np.all(np.isfinite(scores)):
        raise ConfigError("scores must be finite")
    positives = int(labels.sum())
    negatives = labels.shape[0] - positives
    if positives == 0:
        raise ConfigError("ROC needs at least one positive instance")
    if negatives == 0:
        raise ConfigError("ROC needs at least one negative instance")

    order = np.argsort(-scores, kind="stable")
    points = [(0.0, 0.0)]
    thresholds = [math.inf]
    tp = fp = 0
    i = 0
    n = labels.shape[0]
    while i < n:
        j = i
        while j < n and scores[order[j]] == scores[order[i]]:
            tp += int(labels[order[j]] == 1)
            fp += int(labels[order[j]] == 0)
            j += 1
        points.append((fp / negatives, tp / positives))
        thresholds.append(float(scores[order[i]]))
        i = j
    return RocCurve(points=tuple(points), thresholds=tuple(thresholds))


def auc(labels, scores) -> float:
    """Trapezoidal area under the ROC curve."""
    curve = roc_curve(labels, scores)
    area = 0.0
    for (fpr0, tpr0), (fpr1, tpr1) in zip(curve.points, curve.points[1:]):
        area += (fpr1 - fpr0) * (tpr0 + tpr1) / 2.0
    return area


def auc_pair_statistic(labels, scores) -> float:
    """(concordant + 0.5 tied) / (P * N) over all positive-negative pairs."""
    labels, scores = _validate_pair(labels, scores, "scores")
    positive_scores = scores[labels == 1]
    negative_scores = scores[labels == 0]
    if positive_scores.size == 0:
        raise ConfigError("ROC needs at least one positive instance")
    if negative_scores.size == 0:
        raise ConfigError("ROC needs at least one negative instance")
    diff = positive_scores[:, None] - negative_scores[None, :]
    concordant = float(np.sum(diff > 0))
    tied = float(np.sum(diff == 0))
    return (concordant + 0.5 * tied) / diff.size


def _mode_dict(mode_metrics: ModeMetrics) -> dict:
    return {"accuracy": mode_metrics.accuracy,
            "precision": mode_metrics.precision,
            "recall": mode_metrics.recall,
            "f1": mode_metrics.f1}


def emit_report(report: MetricsReport, curve: RocCurve, auc_value: float,
                destination, model_kind: str = "UNKNOWN", seed: int = 0,
                averaging: str = "weighted") -> dict:
    """Write the report JSON and its ROC CSV sibling.

    The CSV lands next to the JSON with an `_roc.csv` suffix. Returns the
    serialized payload for callers that want it in memory.
    """
    if not destination:
        raise InputDataError(f"report destination is empty: "
                             f"{destination!r}")
    payload = {
        "format_version": REPORT_FORMAT_VERSION,
        "model_kind": model_kind,
        "seed": seed,
        "averaging": averaging,
        "counts": {"tp": report.counts.tp, "fp": report.counts.fp,
                   "tn": report.counts.tn, "fn": report.counts.fn},
        "metrics": {"binary": _mode_dict(report.binary),
                    "macro": _mode_dict(report.macro),
                    "weighted": _mode_dict(report.weighted)},
        "auc": auc_value,
        "flags": sorted([metric, mode]
                        for metric, mode in report.undefined_flags),
    }
    try:
        with open(destination, "w", encoding="utf-8") as stream:
            json.dump(payload, stream, sort_keys=True, indent=2)
            stream.write("\n")
        with open(roc_csv_path(destination), "w", encoding="utf-8",
                  newline="") as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(ROC_HEADER)
            for threshold, (fpr, tpr) in zip(curve.thresholds,
                                             curve.points):
                writer.writerow([repr(threshold), repr(fpr), repr(tpr)])
    except OSError as exc:
        raise InputDataError(f"cannot write report to {destination}: "
                             f"{exc}") from exc
    return payload


def roc_csv_path(report_path) -> str:
    """`report.json` -> `report_roc.csv` beside it."""
    text = str(report_path)
    if text.endswith(".json"):
        return text[:-len(".json")] + "_roc.csv"
    return text + "_roc.csv"
