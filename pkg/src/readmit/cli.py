"""Pipeline driver.

Stages run one per invocation and communicate through files:
cohort -> prep -> featurize -> pca -> train -> evaluate -> report,
plus a synthetic-table generator for offline runs. Every stage writes
a manifest with its fully resolved configuration next to its primary
output; `--config <manifest>` replays a stage, with explicit flags
taking precedence over manifest values.

Exit codes: 0 success, 1 invalid usage or configuration, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cohort as cohort_mod
from . import evaluation, figures, manifest, synth, textprep
from .errors import (ConfigError, DimensionError, InputDataError,
                     ReadmitError, SchemaError)
from .features import embed as embed_mod
from .features import pca as pca_mod
from .features import tfidf as tfidf_mod
from .models import (Dataset, load_model, logreg_top_features,
                     predict_labels, predict_scores, save_model,
                     train_model)

DEFAULT_RATIOS = "0.7,0.15,0.15"
REPRESENTATIONS = ("tfidf", "embedding")
CLEANED_EXTRA_COLUMN = "CLEAN_TEXT"

_HYPER_DEFAULTS = {
    "LOGREG": {"learning_rate": 0.1, "epochs": 500, "l2": 1e-4},
    "KNN": {"k": 5},
    "GNB": {"var_smoothing": 1e-9},
    "RF": {"n_trees": 100, "max_depth": 16, "min_leaf": 2,
           "bootstrap": True},
    "SVM": {"lam": 1e-4, "epochs": 20},
    "MLP": {"hidden": "32", "learning_rate": 0.01, "epochs": 30,
            "batch_size": 64, "l2": 0.0},
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on bad flags instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise _UsageError(message)


@dataclass(frozen=True)
class CleanedDoc:
    hadm_id: int
    label: int
    clean_text: str

    @property
    def tokens(self) -> tuple[str, ...]:
        return tuple(self.clean_text.split())


def _parse_ratios(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"ratios need three comma-separated values, "
                          f"got {text!r}")
    try:
        ratios = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad ratios {text!r}: {exc}") from exc
    return ratios


def _parse_hidden(text: str) -> list[int]:
    try:
        return [int(p) for p in str(text).split(",") if p != ""]
    except ValueError as exc:
        raise ConfigError(f"bad hidden sizes {text!r}: {exc}") from exc


def _resolve(args, defaults: dict) -> dict:
    """Merge flag > config-file > default for every known key."""
    from_file = {}
    if getattr(args, "config", None):
        from_file = manifest.read_manifest(args.config)["config"]
    resolved = {}
    for key, default in defaults.items():
        explicit = getattr(args, key, None)
        if explicit is not None:
            resolved[key] = explicit
        elif from_file.get(key) is not None:
            resolved[key] = from_file[key]
        else:
            resolved[key] = default
    return resolved


def _require(parser, resolved: dict, *keys) -> None:
    for key in keys:
        if resolved[key] is None:
            parser.error(f"--{key.replace('_', '-')} is required")


def _read_cleaned(path) -> list[CleanedDoc]:
    with open(path, "r", encoding="utf-8", newline="") as stream:
        reader = csv.DictReader(stream)
        required = {"HADM_ID", "LABEL", CLEANED_EXTRA_COLUMN}
        missing = required - set(reader.fieldnames or ())
        if missing:
            raise SchemaError(f"cleaned cohort {path} lacks columns "
                              f"{sorted(missing)}")
        return [CleanedDoc(hadm_id=int(row["HADM_ID"]),
                           label=int(row["LABEL"]),
                           clean_text=row[CLEANED_EXTRA_COLUMN])
                for row in reader]


def _split_docs(docs: list[CleanedDoc], split: str, seed: int,
                ratios: tuple[float, float, float]) -> list[CleanedDoc]:
    split = split.upper()
    if split not in cohort_mod.SPLIT_NAMES:
        raise ConfigError(f"unknown split {split!r}; expected one of "
                          f"{', '.join(cohort_mod.SPLIT_NAMES)}")
    assignment = cohort_mod.stratified_split_ids(
        [d.hadm_id for d in docs], [d.label for d in docs], ratios, seed)
    return [d for d in docs if assignment.assignment[d.hadm_id] == split]


def _read_feature_table(path) -> dict[int, np.ndarray]:
    """Generic HADM_ID + numeric-columns CSV (embeddings or reduced)."""
    with open(path, "r", encoding="utf-8", newline="") as stream:
        reader = csv.reader(stream)
        header = next(reader, None)
        if not header or header[0] != "HADM_ID" or len(header) < 2:
            raise SchemaError(f"feature table {path} must start with an "
                              f"HADM_ID column")
        width = len(header)
        table: dict[int, np.ndarray] = {}
        for row_number, row in enumerate(reader, start=1):
            if len(row) != width:
                raise DimensionError(f"{path} row {row_number}: expected "
                                     f"{width} columns, got {len(row)}")
            vector = np.array([float(v) for v in row[1:]])
            if not np.all(np.isfinite(vector)):
                raise DimensionError(f"{path} row {row_number}: "
                                     f"non-finite value")
            table[int(row[0])] = vector
    return table


def _write_feature_table(path, prefix: str, hadm_ids: list[int],
                         matrix: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["HADM_ID"] + [f"{prefix}{i:04d}"
                                       for i in range(matrix.shape[1])])
        for hadm_id, row in zip(hadm_ids, matrix):
            writer.writerow([hadm_id] + [repr(float(v)) for v in row])


def _feature_matrix(docs: list[CleanedDoc], representation: str,
                    features_path) -> np.ndarray:
    if representation == "tfidf":
        model = tfidf_mod.load_tfidf(features_path)
        vectors = [tfidf_mod.tfidf_transform(
            model, textprep.TokenizedDoc(d.hadm_id, d.tokens))
            for d in docs]
        return tfidf_mod.densify(vectors)
    table = _read_feature_table(features_path)
    missing = [d.hadm_id for d in docs if d.hadm_id not in table]
    if missing:
        raise InputDataError(f"feature table lacks {len(missing)} "
                             f"cohort rows (first: {missing[0]})")
    return np.stack([table[d.hadm_id] for d in docs])


def _model_seed(model) -> int:
    seed = getattr(model, "train_seed", None)
    if seed is None:
        seed = model.spec.seed
    return seed


# ---------------------------------------------------------------- stages


def _cmd_cohort(args) -> int:
    parser = args._parser
    resolved = _resolve(args, {
        "admissions": None, "notes": None, "out": None,
        "policy": cohort_mod.SKIP_NEXT_ELECTIVE, "rejects": None,
    })
    _require(parser, resolved, "admissions", "notes", "out")
    if resolved["rejects"] is None:
        out = Path(resolved["out"])
        resolved["rejects"] = str(out.with_name(out.stem + "_rejects.csv"))
    rows, rejects = cohort_mod.build_cohort(resolved["admissions"],
                                            resolved["notes"],
                                            policy=resolved["policy"])
    cohort_mod.write_cohort_csv(rows, resolved["out"])
    cohort_mod.write_rejects_csv(rejects, resolved["rejects"])
    manifest.write_manifest(resolved["out"], "cohort", resolved)
    positives = sum(r.label for r in rows)
    print(f"wrote {resolved['out']}: {len(rows)} rows, "
          f"{positives} positive; {len(rejects)} rejected rows in "
          f"{resolved['rejects']}")
    return 0


def _cmd_prep(args) -> int:
    parser = args._parser
    resolved = _resolve(args, {
        "cohort": None, "out": None, "lemmatize": True,
        "keep_negations": True, "stopwords": None, "lemmas": None,
        "freq_out": None, "top_n": 40,
    })
    _require(parser, resolved, "cohort", "out")
    config = textprep.CleanConfig(
        lemmatize=bool(resolved["lemmatize"]),
        keep_negations=bool(resolved["keep_negations"]),
        stopword_list=textprep.load_stopwords(resolved["stopwords"]),
        lemma_table=textprep.load_lemmas(resolved["lemmas"]),
    )
    docs = []
    with open(resolved["cohort"], "r", encoding="utf-8",
              newline="") as stream:
        reader = csv.DictReader(stream)
        fieldnames = list(reader.fieldnames or ())
        missing = set(cohort_mod.COHORT_COLUMNS) - set(fieldnames)
        if missing:
            raise SchemaError(f"cohort file lacks columns "
                              f"{sorted(missing)}")
        rows = list(reader)
    with open(resolved["out"], "w", encoding="utf-8",
              newline="") as stream:
        writer = csv.DictWriter(stream,
                                fieldnames=fieldnames
                                + [CLEANED_EXTRA_COLUMN],
                                lineterminator="\n")
        writer.writeheader()
        for row in rows:
            doc, clean = textprep.clean_pipeline(
                row["TEXT"], config, hadm_id=int(row["HADM_ID"]))
            docs.append(doc)
            row[CLEANED_EXTRA_COLUMN] = clean
            writer.writerow(row)
    if resolved["freq_out"]:
        pairs = textprep.token_frequency_report(docs,
                                                int(resolved["top_n"]))
        with open(resolved["freq_out"], "w", encoding="utf-8",
                  newline="") as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(["TERM", "COUNT"])
            writer.writerows(pairs)
    manifest.write_manifest(resolved["out"], "prep", resolved)
    print(f"wrote {resolved['out']}: {len(rows)} documents cleaned")
    return 0


def _embedding_rows(docs: list[CleanedDoc], provider: str,
                    embed_seed: int) -> list[embed_mod.DocumentEmbedding]:
    if provider == "mock":
        return [embed_mod.embed_document(list(d.tokens), seed=embed_seed,
                                         hadm_id=d.hadm_id)
                for d in docs]
    if provider.startswith("file="):
        return embed_mod.read_embeddings(provider[len("file="):])
    if provider == "service" or provider.startswith("service="):
        url = provider[len("service="):] if "=" in provider \
            else os.environ.get("READMIT_EMBED_URL", "")
        if not url:
            raise ConfigError("service provider needs a URL: use "
                              "--provider service=<url> or set "
                              "READMIT_EMBED_URL")
        return [embed_mod.embed_via_service(url, d.clean_text,
                                            hadm_id=d.hadm_id)
                for d in docs]
    raise ConfigError(f"unknown provider {provider!r}; expected mock, "
                      f"file=<path>, or service[=url]")


def _cmd_featurize(args) -> int:
    parser = args._parser
    resolved = _resolve(args, {
        "cleaned": None, "representation": None, "out": None,
        "max_features": tfidf_mod.DEFAULT_MAX_FEATURES,
        "split_seed": 0, "ratios": DEFAULT_RATIOS,
        "provider": "mock", "embed_seed": 0,
    })
    _require(parser, resolved, "cleaned", "representation", "out")
    representation = resolved["representation"]
    if representation not in REPRESENTATIONS:
        parser.error(f"--representation must be one of "
                     f"{', '.join(REPRESENTATIONS)}")
    docs = _read_cleaned(resolved["cleaned"])
    if representation == "tfidf":
        train_docs = _split_docs(docs, "TRAIN",
                                 int(resolved["split_seed"]),
                                 _parse_ratios(resolved["ratios"]))
        corpus = [textprep.TokenizedDoc(d.hadm_id, d.tokens)
                  for d in train_docs]
        model = tfidf_mod.tfidf_fit(corpus,
                                    int(resolved["max_features"]))
        tfidf_mod.save_tfidf(model, resolved["out"])
        print(f"wrote {resolved['out']}: vocabulary {model.dimension} "
              f"terms from {len(corpus)} training documents")
    else:
        rows = _embedding_rows(docs, resolved["provider"],
                               int(resolved["embed_seed"]))
        embed_mod.write_embeddings(rows, resolved["out"])
        print(f"wrote {resolved['out']}: {len(rows)} document "
              f"embeddings")
    manifest.write_manifest(resolved["out"], "featurize", resolved)
    return 0


def _cmd_pca(args) -> int:
    parser = args._parser
    resolved = _resolve(args, {
        "embeddings": None, "cleaned": None, "out": None,
        "reduced": None, "k": pca_mod.DEFAULT_COMPONENTS,
        "split_seed": 0, "ratios": DEFAULT_RATIOS,
    })
    _require(parser, resolved, "embeddings", "cleaned", "out", "reduced")
    docs = _read_cleaned(resolved["cleaned"])
    table = _read_feature_table(resolved["embeddings"])
    train_docs = _split_docs(docs, "TRAIN", int(resolved["split_seed"]),
                             _parse_ratios(resolved["ratios"]))
    missing = [d.hadm_id for d in train_docs if d.hadm_id not in table]
    if missing:
        raise InputDataError(f"embeddings lack {len(missing)} cohort "
                             f"rows (first: {missing[0]})")
    train_matrix = np.stack([table[d.hadm_id] for d in train_docs])
    model = pca_mod.pca_fit(train_matrix, k=int(resolved["k"]))
    pca_mod.save_pca(model, resolved["out"])
    hadm_ids = [d.hadm_id for d in docs]
    reduced = pca_mod.pca_transform(
        model, np.stack([table[h] for h in hadm_ids]))
    _write_feature_table(resolved["reduced"], "P", hadm_ids, reduced)
    manifest.write_manifest(resolved["out"], "pca", resolved)
    print(f"wrote {resolved['out']} and {resolved['reduced']}: "
          f"{model.k} components from {train_matrix.shape[0]} "
          f"training rows")
    return 0


def _hyperparameters(resolved: dict, kind: str) -> dict:
    defaults = _HYPER_DEFAULTS[kind]
    lookup = {
        "learning_rate": resolved.get("lr"),
        "epochs": resolved.get("epochs"),
        "l2": resolved.get("l2"),
        "k": resolved.get("k"),
        "var_smoothing": resolved.get("var_smoothing"),
        "n_trees": resolved.get("n_trees"),
        "max_depth": resolved.get("max_depth"),
        "min_leaf": resolved.get("min_leaf"),
        "bootstrap": resolved.get("bootstrap"),
        "lam": resolved.get("lam"),
        "hidden": resolved.get("hidden"),
        "batch_size": resolved.get("batch_size"),
    }
    kwargs = {}
    for name, default in defaults.items():
        value = lookup.get(name)
        kwargs[name] = default if value is None else value
    if "hidden" in kwargs:
        kwargs["hidden"] = _parse_hidden(kwargs["hidden"])
    return kwargs


def _cmd_train(args) -> int:
    parser = args._parser
    resolved = _resolve(args, {
        "cleaned": None, "representation": None, "features": None,
        "model": None, "out": None, "seed": 0, "split": "train",
        "split_seed": 0, "ratios": DEFAULT_RATIOS,
        "lr": None, "epochs": None, "l2": None, "k": None,
        "var_smoothing": None, "n_trees": None, "max_depth": None,
        "min_leaf": None, "bootstrap": None, "lam": None,
        "hidden": None, "batch_size": None,
    })
    _require(parser, resolved, "cleaned", "representation", "features",
             "model", "out")
    kind = str(resolved["model"]).upper()
    if kind not in _HYPER_DEFAULTS:
        parser.error(f"--model must be one of "
                     f"{', '.join(_HYPER_DEFAULTS)}")
    if resolved["representation"] not in REPRESENTATIONS:
        parser.error(f"--representation must be one of "
                     f"{', '.join(REPRESENTATIONS)}")
    docs = _read_cleaned(resolved["cleaned"])
    split_docs = _split_docs(docs, resolved["split"],
                             int(resolved["split_seed"]),
                             _parse_ratios(resolved["ratios"]))
    features = _feature_matrix(split_docs, resolved["representation"],
                               resolved["features"])
    labels = np.array([d.label for d in split_docs])
    kwargs = _hyperparameters(resolved, kind)
    model = train_model(kind, Dataset(features, labels),
                        seed=int(resolved["seed"]), **kwargs)
    save_model(model, resolved["out"])
    manifest.write_manifest(resolved["out"], "train", resolved)
    print(f"wrote {resolved['out']}: {kind} trained on "
          f"{features.shape[0]} rows x {features.shape[1]} features")
    return 0


def _cmd_evaluate(args) -> int:
    parser = args._parser
    resolved = _resolve(args, {
        "cleaned": None, "representation": None, "features": None,
        "model": None, "out": None, "split": "test",
        "split_seed": 0, "ratios": DEFAULT_RATIOS,
        "average": "weighted", "top_features": None, "top_n": 10,
    })
    _require(parser, resolved, "cleaned", "representation", "features",
             "model", "out")
    if resolved["average"] not in evaluation.AVERAGING_MODES:
        parser.error(f"--average must be one of "
                     f"{', '.join(evaluation.AVERAGING_MODES)}")
    model = load_model(resolved["model"])
    docs = _read_cleaned(resolved["cleaned"])
    split_docs = _split_docs(docs, resolved["split"],
                             int(resolved["split_seed"]),
                             _parse_ratios(resolved["ratios"]))
    features = _feature_matrix(split_docs, resolved["representation"],
                               resolved["features"])
    labels = np.array([d.label for d in split_docs])
    scores = predict_scores(model, features)
    predictions = predict_labels(model, features)
    report = evaluation.metrics(labels, predictions,
                                mode=resolved["average"])
    curve = evaluation.roc_curve(labels, scores)
    auc_value = evaluation.auc(labels, scores)
    evaluation.emit_report(report, curve, auc_value, resolved["out"],
                           model_kind=model.kind,
                           seed=_model_seed(model),
                           averaging=resolved["average"])
    if resolved["top_features"]:
        tfidf_model = tfidf_mod.load_tfidf(resolved["features"]) \
            if resolved["representation"] == "tfidf" else None
        if tfidf_model is None:
            raise ConfigError("--top-features requires the tfidf "
                              "representation")
        positive, negative = logreg_top_features(
            model, tfidf_model.vocabulary, top_n=int(resolved["top_n"]))
        with open(resolved["top_features"], "w", encoding="utf-8",
                  newline="") as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(["SIDE", "TERM", "WEIGHT"])
            for term, weight in positive:
                writer.writerow(["positive", term, repr(weight)])
            for term, weight in negative:
                writer.writerow(["negative", term, repr(weight)])
    manifest.write_manifest(resolved["out"], "evaluate", resolved)
    headline = report.for_mode(resolved["average"])
    print(f"wrote {resolved['out']}: {model.kind} "
          f"accuracy {headline.accuracy:.3f} auc {auc_value:.3f} "
          f"on {labels.shape[0]} rows")
    return 0


def _cmd_synth(args) -> int:
    parser = args._parser
    resolved = _resolve(args, {
        "n": 2000, "prevalence": 0.06, "signal": 0.9, "seed": 7,
        "out_admissions": "admissions.csv", "out_notes": "notes.csv",
    })
    tables = synth.generate(int(resolved["n"]),
                            float(resolved["prevalence"]),
                            int(resolved["seed"]),
                            float(resolved["signal"]))
    synth.write_tables(tables, resolved["out_admissions"],
                       resolved["out_notes"])
    manifest.write_manifest(resolved["out_admissions"], "synth", resolved)
    print(f"wrote {resolved['out_admissions']} and "
          f"{resolved['out_notes']}: {int(resolved['n'])} documents, "
          f"{tables.n_positive} positive")
    return 0


def _cmd_report(args) -> int:
    parser = args._parser
    resolved = _resolve(args, {
        "reports": None, "out": None, "figures": True,
        "freq": None, "top_features": None,
    })
    _require(parser, resolved, "reports", "out")
    payloads = []
    for path in resolved["reports"]:
        with open(path, "r", encoding="utf-8") as stream:
            payloads.append((path, json.load(stream)))
    modes = {p.get("averaging", "weighted") for _, p in payloads}
    if len(modes) > 1:
        raise ConfigError(f"reports mix averaging modes "
                          f"{sorted(modes)}; re-run evaluate with one "
                          f"--average")
    mode = modes.pop()
    rows = []
    for path, payload in payloads:
        block = payload["metrics"][mode]
        rows.append((payload["model_kind"], block["accuracy"],
                     block["precision"], block["recall"], block["f1"],
                     payload["auc"], path))
    rows.sort(key=lambda r: (-r[5], r[0]))
    with open(resolved["out"], "w", encoding="utf-8",
              newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["MODEL", "ACCURACY", "PRECISION", "RECALL",
                         "F1", "AUC"])
        for kind, acc, prec, rec, f1, auc_value, _ in rows:
            writer.writerow([kind, repr(acc), repr(prec), repr(rec),
                             repr(f1), repr(auc_value)])
    out_base = str(Path(resolved["out"]).with_suffix(""))
    if resolved["figures"]:
        figures.auc_bar_figure([(r[0], r[5]) for r in rows],
                               out_base + "_auc.png")
        curves = {}
        for kind, *_rest, path in rows:
            roc_path = evaluation.roc_csv_path(path)
            if os.path.exists(roc_path):
                with open(roc_path, "r", encoding="utf-8",
                          newline="") as stream:
                    reader = csv.reader(stream)
                    next(reader)
                    curves[kind] = [(float(r[1]), float(r[2]))
                                    for r in reader]
        if curves:
            figures.roc_overlay_figure(curves, out_base + "_roc.png")
        if resolved["freq"]:
            with open(resolved["freq"], "r", encoding="utf-8",
                      newline="") as stream:
                reader = csv.reader(stream)
                next(reader)
                pairs = [(r[0], int(r[1])) for r in reader]
            figures.token_frequency_figure(pairs,
                                           out_base + "_terms.png")
        if resolved["top_features"]:
            with open(resolved["top_features"], "r", encoding="utf-8",
                      newline="") as stream:
                reader = csv.reader(stream)
                next(reader)
                positive, negative = [], []
                for side, term, weight in reader:
                    target = positive if side == "positive" else negative
                    target.append((term, float(weight)))
            figures.top_features_figure(positive, negative,
                                        out_base + "_features.png")
    manifest.write_manifest(resolved["out"], "report", resolved)
    print(f"wrote {resolved['out']}: {len(rows)} models compared")
    return 0


# ------------------------------------------------------------- parser


def build_parser() -> _Parser:
    parser = _Parser(prog="readmit",
                     description="30-day readmission prediction from "
                                 "discharge summaries")
    subparsers = parser.add_subparsers(dest="subcommand")

    def add(name, handler, configure):
        sub = subparsers.add_parser(name, add_help=True)
        sub.add_argument("--config", help="manifest JSON to replay; "
                                          "flags override its values")
        configure(sub)
        sub.set_defaults(_handler=handler, _parser=sub)
        return sub

    def conf_cohort(sub):
        sub.add_argument("--admissions")
        sub.add_argument("--notes")
        sub.add_argument("--out")
        sub.add_argument("--policy",
                         choices=cohort_mod.ELECTIVE_POLICIES)
        sub.add_argument("--rejects")

    def conf_prep(sub):
        sub.add_argument("--cohort")
        sub.add_argument("--out")
        sub.add_argument("--lemmatize",
                         action=argparse.BooleanOptionalAction,
                         default=None)
        sub.add_argument("--keep-negations", dest="keep_negations",
                         action=argparse.BooleanOptionalAction,
                         default=None)
        sub.add_argument("--stopwords")
        sub.add_argument("--lemmas")
        sub.add_argument("--freq-out", dest="freq_out")
        sub.add_argument("--top-n", dest="top_n", type=int)

    def conf_featurize(sub):
        sub.add_argument("--cleaned")
        sub.add_argument("--representation", choices=REPRESENTATIONS)
        sub.add_argument("--out")
        sub.add_argument("--max-features", dest="max_features", type=int)
        sub.add_argument("--split-seed", dest="split_seed", type=int)
        sub.add_argument("--ratios")
        sub.add_argument("--provider")
        sub.add_argument("--embed-seed", dest="embed_seed", type=int)

    def conf_pca(sub):
        sub.add_argument("--embeddings")
        sub.add_argument("--cleaned")
        sub.add_argument("--out")
        sub.add_argument("--reduced")
        sub.add_argument("--k", type=int)
        sub.add_argument("--split-seed", dest="split_seed", type=int)
        sub.add_argument("--ratios")

    def conf_train(sub):
        sub.add_argument("--cleaned")
        sub.add_argument("--representation", choices=REPRESENTATIONS)
        sub.add_argument("--features")
        sub.add_argument("--model")
        sub.add_argument("--out")
        sub.add_argument("--seed", type=int)
        sub.add_argument("--split")
        sub.add_argument("--split-seed", dest="split_seed", type=int)
        sub.add_argument("--ratios")
        sub.add_argument("--lr", type=float)
        sub.add_argument("--epochs", type=int)
        sub.add_argument("--l2", type=float)
        sub.add_argument("--k", type=int)
        sub.add_argument("--var-smoothing", dest="var_smoothing",
                         type=float)
        sub.add_argument("--n-trees", dest="n_trees", type=int)
        sub.add_argument("--max-depth", dest="max_depth", type=int)
        sub.add_argument("--min-leaf", dest="min_leaf", type=int)
        sub.add_argument("--bootstrap",
                         action=argparse.BooleanOptionalAction,
                         default=None)
        sub.add_argument("--lam", type=float)
        sub.add_argument("--hidden")
        sub.add_argument("--batch-size", dest="batch_size", type=int)

    def conf_evaluate(sub):
        sub.add_argument("--cleaned")
        sub.add_argument("--representation", choices=REPRESENTATIONS)
        sub.add_argument("--features")
        sub.add_argument("--model")
        sub.add_argument("--out")
        sub.add_argument("--split")
        sub.add_argument("--split-seed", dest="split_seed", type=int)
        sub.add_argument("--ratios")
        sub.add_argument("--average",
                         choices=evaluation.AVERAGING_MODES)
        sub.add_argument("--top-features", dest="top_features")
        sub.add_argument("--top-n", dest="top_n", type=int)

    def conf_synth(sub):
        sub.add_argument("--n", type=int)
        sub.add_argument("--prevalence", type=float)
        sub.add_argument("--signal", type=float)
        sub.add_argument("--seed", type=int)
        sub.add_argument("--out-admissions", dest="out_admissions")
        sub.add_argument("--out-notes", dest="out_notes")

    def conf_report(sub):
        sub.add_argument("--reports", nargs="+")
        sub.add_argument("--out")
        sub.add_argument("--figures",
                         action=argparse.BooleanOptionalAction,
                         default=None)
        sub.add_argument("--freq")
        sub.add_argument("--top-features", dest="top_features")

    add("cohort", _cmd_cohort, conf_cohort)
    add("prep", _cmd_prep, conf_prep)
    add("featurize", _cmd_featurize, conf_featurize)
    add("pca", _cmd_pca, conf_pca)
    add("train", _cmd_train, conf_train)
    add("evaluate", _cmd_evaluate, conf_evaluate)
    add("synth", _cmd_synth, conf_synth)
    add("report", _cmd_report, conf_report)
    return parser


def run_subcommand(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "_handler", None):
            parser.print_usage(sys.stderr)
            return 1
        return args._handler(args)
    except _UsageError:
        return 1
    except FileNotFoundError as exc:
        name = exc.filename if exc.filename else exc
        sys.stderr.write(f"error: missing input file: {name}\n")
        return 2
    except (InputDataError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ReadmitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def main(argv=None) -> int:
    return run_subcommand(argv)


if __name__ == "__main__":
    sys.exit(main())
