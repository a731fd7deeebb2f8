"""Discharge-summary text cleaning.

Stages: special-pattern removal (de-identification spans, honorific
titles, numeric dose values, boilerplate header lines), tokenization,
lemmatization, and stopword removal with a protected negation set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import ConfigError

# Terms kept regardless of the stopword list: negations and qualifiers
# carry clinical signal ("without edema", "family history negative").
PROTECTED_TERMS = frozenset({"without", "no", "not", "negative", "normal",
                             "family"})

# Applied in order, each match replaced by a single space.
DEFAULT_SPECIAL_PATTERNS: tuple[str, ...] = (
    r"\[\*\*.*?\*\*\]",                                     # de-id spans
    r"(?i)\b(?:dr|mr|mrs|ms)\.|\bm\.d\.|\bph\.?d\b",        # titles
    r"(?im)^[ \t]*(?:admission date|discharge date|service)\s*:[^\n]*$",
    r"\b\d+(?:[.,]\d+)*\b",                                 # dose numbers
)

_TOKEN_SPLIT = re.compile(r"[^a-zA-Z]+")
_WHITESPACE_RUN = re.compile(r"\s+")

_MIN_TOKEN_LEN = 2


@dataclass
class CleanConfig:
    """Settings for the cleaning pipeline.

    Stopword terms that collide with the protected set are dropped from
    the effective list at construction when keep_negations is on.
    """

    lowercase: bool = True
    lemmatize: bool = True
    stopword_list: frozenset[str] = frozenset()
    keep_negations: bool = True
    special_patterns: tuple[str, ...] = DEFAULT_SPECIAL_PATTERNS
    lemma_table: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        stopwords = frozenset(self.stopword_list)
        if self.keep_negations:
            stopwords = stopwords - PROTECTED_TERMS
        self.stopword_list = stopwords


@dataclass(frozen=True)
class TokenizedDoc:
    hadm_id: int
    tokens: tuple[str, ...]


def _read_fixture_lines(filename: str) -> list[str]:
    path = resources.files("readmit.data").joinpath(filename)
    lines = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    return lines


def load_stopwords(path=None) -> frozenset[str]:
    """Load the stopword fixture (one term per line, '#' comments)."""
    if path is None:
        lines = _read_fixture_lines("stopwords.txt")
    else:
        with open(path, "r", encoding="utf-8") as stream:
            lines = [ln.strip() for ln in stream
                     if ln.strip() and not ln.strip().startswith("#")]
    return frozenset(lines)


def load_lemmas(path=None) -> dict[str, str]:
    """Load the lemma fixture (form<TAB>lemma per line, '#' comments)."""
    if path is None:
        lines = _read_fixture_lines("lemmas.tsv")
    else:
        with open(path, "r", encoding="utf-8") as stream:
            lines = [ln.strip() for ln in stream
                     if ln.strip() and not ln.strip().startswith("#")]
    table = {}
    for line in lines:
        form, sep, lemma = line.partition("\t")
        if not sep:
            raise ConfigError(f"lemma fixture line lacks a tab: {line!r}")
        table[form.strip()] = lemma.strip()
    return table


def default_config() -> CleanConfig:
    return CleanConfig(stopword_list=load_stopwords(),
                       lemma_table=load_lemmas())


def remove_special(text: str,
                   patterns: tuple[str, ...] = DEFAULT_SPECIAL_PATTERNS,
                   ) -> str:
    """Strip special spans, then collapse whitespace runs to one space."""
    for pattern in patterns:
        text = re.sub(pattern, " ", text)
    return _WHITESPACE_RUN.sub(" ", text)


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Split on non-alphabetic runs; drop tokens shorter than two chars."""
    if lowercase:
        text = text.lower()
    return [t for t in _TOKEN_SPLIT.split(text) if len(t) >= _MIN_TOKEN_LEN]


def _suffix_lemma(token: str) -> str:
    """Conservative plural stripping for out-of-dictionary tokens."""
    if token.endswith("ies") and len(token) >= 5:
        return token[:-3] + "y"
    if token.endswith("sses"):
        return token[:-2]
    if token.endswith("ss"):
        return token
    if token.endswith("s") and len(token) >= 4 and \
            not token.endswith(("us", "is")):
        return token[:-1]
    return token


def lemmatize(tokens: list[str],
              table: dict[str, str] | None = None) -> list[str]:
    """Map tokens through the lemma dictionary, then suffix rules."""
    if table is None:
        table = load_lemmas()
    out = []
    for token in tokens:
        lemma = table.get(token)
        out.append(lemma if lemma is not None else _suffix_lemma(token))
    return out


def remove_stopwords(tokens: list[str], config: CleanConfig) -> list[str]:
    """Drop stopword-list tokens; protected terms always survive."""
    stopwords = config.stopword_list
    if config.keep_negations:
        stopwords = stopwords - PROTECTED_TERMS
    return [t for t in tokens if t not in stopwords]


def clean_pipeline(text: str, config: CleanConfig | None = None,
                   hadm_id: int = 0) -> tuple[TokenizedDoc, str]:
    """Run all cleaning stages; returns tokens and the space-joined string.

    The joined string is idempotent under re-cleaning and is the payload
    sent to the embedding service.
    """
    if config is None:
        config = default_config()
    stripped = remove_special(text, config.special_patterns)
    tokens = tokenize(stripped, lowercase=config.lowercase)
    if config.lemmatize:
        tokens = lemmatize(tokens, config.lemma_table)
    tokens = remove_stopwords(tokens, config)
    doc = TokenizedDoc(hadm_id=hadm_id, tokens=tuple(tokens))
    return doc, " ".join(tokens)


def token_frequency_report(docs: list[TokenizedDoc],
                           top_n: int) -> list[tuple[str, int]]:
    """Corpus term counts, ranked count-descending then term-ascending."""
    if top_n < 1:
        raise ConfigError(f"top_n must be >= 1, got {top_n}")
    counts: dict[str, int] = {}
    for doc in docs:
        for token in doc.tokens:
            counts[token] = counts.get(token, 0) + 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:top_n]
