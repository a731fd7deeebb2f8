"""Thirty-day hospital readmission prediction from discharge summaries.

A file-driven pipeline: cohort construction from admission and note
tables, clinical text cleaning, TF-IDF or chunked mean-pooled document
embeddings with PCA reduction, six from-scratch classifiers, and
confusion/ROC evaluation. See the `readmit` command-line entry point.
"""

__version__ = "0.1.0"

from .errors import (ConfigError, DimensionError, InputDataError,
                     ReadmitError, SchemaError, TrainingDivergedError)

__all__ = [
    "__version__",
    "ReadmitError", "SchemaError", "InputDataError", "ConfigError",
    "DimensionError", "TrainingDivergedError",
]
