"""Figure rendering for the report path.

All figures go straight to image files (headless backend); the report
subcommand writes them next to its delimited output.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def roc_overlay_figure(curves: dict[str, list[tuple[float, float]]],
                       path) -> None:
    """One ROC plot with a labeled line per model."""
    figure, axis = plt.subplots(figsize=(6, 5))
    for label in sorted(curves):
        points = curves[label]
        axis.plot([p[0] for p in points], [p[1] for p in points],
                  label=label)
    axis.plot([0, 1], [0, 1], linestyle="--", color="gray",
              label="chance")
    axis.set_xlabel("False positive rate")
    axis.set_ylabel("True positive rate")
    axis.set_title("ROC curves")
    axis.legend(loc="lower right", fontsize=8)
    figure.tight_layout()
    figure.savefig(path, dpi=120)
    plt.close(figure)


def auc_bar_figure(rows: list[tuple[str, float]], path) -> None:
    """Horizontal AUC bars, one per model, highest on top."""
    figure, axis = plt.subplots(figsize=(6, 0.6 * max(len(rows), 2) + 1))
    names = [name for name, _ in rows][::-1]
    values = [value for _, value in rows][::-1]
    axis.barh(names, values, color="#4878d0")
    axis.set_xlim(0.0, 1.0)
    axis.axvline(0.5, linestyle="--", color="gray", linewidth=1)
    axis.set_xlabel("AUC")
    axis.set_title("Model comparison")
    figure.tight_layout()
    figure.savefig(path, dpi=120)
    plt.close(figure)


def token_frequency_figure(pairs: list[tuple[str, int]], path) -> None:
    """Horizontal bars of the most frequent corpus terms."""
    figure, axis = plt.subplots(figsize=(6, 0.3 * max(len(pairs), 2) + 1))
    terms = [term for term, _ in pairs][::-1]
    counts = [count for _, count in pairs][::-1]
    axis.barh(terms, counts, color="#6acc64")
    axis.set_xlabel("Corpus frequency")
    axis.set_title("Most frequent terms")
    figure.tight_layout()
    figure.savefig(path, dpi=120)
    plt.close(figure)


def top_features_figure(positive: list[tuple[str, float]],
                        negative: list[tuple[str, float]], path) -> None:
    """Two panels of signed logistic-regression weights."""
    figure, (left, right) = plt.subplots(1, 2, figsize=(9, 4))
    for axis, rows, title, color in (
            (left, positive, "Pushes toward readmission", "#d65f5f"),
            (right, negative, "Pushes away", "#4878d0")):
        terms = [term for term, _ in rows][::-1]
        weights = [weight for _, weight in rows][::-1]
        axis.barh(terms, weights, color=color)
        axis.set_title(title, fontsize=10)
        axis.set_xlabel("Weight")
    figure.tight_layout()
    figure.savefig(path, dpi=120)
    plt.close(figure)
