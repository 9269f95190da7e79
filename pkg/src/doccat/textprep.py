"""Bengali text preprocessing: sentence split, tokenize, symbol strip, stem, stopwords.

The pipeline applied per document is

    split_sentences -> tokenize -> strip_symbols -> (lowercase Latin)
        -> stem -> remove_stopwords

Sentences are kept as the grouping unit because the chi-square feature
scorer uses the sentence as its co-occurrence window. Bengali script has
no case, so only embedded Latin fragments are lowercased.

The stemmer is a table-driven longest-suffix stripper: at most one suffix
is removed per token, and a rule fires only when stripping leaves at least
the rule's minimum stem length. The shipped table lists composed
plural+case chains as single rules so one pass removes the whole
inflection; with it, re-preprocessing preprocessed text is a no-op on
ordinary Bengali prose. A pathological token can still expose a second
suffix after one strip (no finite single-pass table can rule that out),
which is why the suffix table stays a replaceable data file rather than
hard-coded rules.

All operations are pure functions of (input, config); documents may be
preprocessed in parallel with no shared state.
"""

from __future__ import annotations

import hashlib
import json
import re
import string
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .corpus import LabeledCorpus, LabeledDocument

SENTENCE_SPLIT_RE = re.compile(r"[।?!\n]")

BENGALI_DIGITS = "০১২৩৪৫৬৭৮৯"

DEFAULT_STRIP_SYMBOLS: frozenset[str] = frozenset(
    string.punctuation
    + string.digits
    + BENGALI_DIGITS
    + "।॥"
    + "“”‘’„‚«»"  # curly quotes, guillemets
    + "–—…"  # dashes, ellipsis
)


@dataclass(frozen=True)
class PreprocessConfig:
    """Immutable preprocessing configuration.

    `suffix_table` is an ordered list of (suffix, min_stem_length) rules,
    sorted by descending suffix length so longest-match-first is well
    defined. `stopword_list` should contain the stemmed forms of inflected
    stopwords as well, since stopword removal runs after stemming.
    """

    stopword_list: frozenset[str]
    suffix_table: tuple[tuple[str, int], ...]
    strip_symbols: frozenset[str] = DEFAULT_STRIP_SYMBOLS
    enable_stemming: bool = True
    enable_stopwords: bool = True
    lowercase_latin: bool = True

    def __post_init__(self) -> None:
        validate_suffix_table(self.suffix_table)

    def digest(self) -> str:
        """Stable checksum of the full configuration, for model files."""
        payload = json.dumps(
            {
                "stopword_list": sorted(self.stopword_list),
                "suffix_table": [list(rule) for rule in self.suffix_table],
                "strip_symbols": sorted(self.strip_symbols),
                "enable_stemming": self.enable_stemming,
                "enable_stopwords": self.enable_stopwords,
                "lowercase_latin": self.lowercase_latin,
            },
            ensure_ascii=False,
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class TokenizedDocument:
    """Sentence-grouped tokens produced by the preprocessing pipeline."""

    sentences: tuple[tuple[str, ...], ...]
    label: str | None = None
    doc_id: str | None = None

    @property
    def token_count(self) -> int:
        return sum(len(sentence) for sentence in self.sentences)

    def tokens(self):
        """Iterate over all tokens in sentence order."""
        for sentence in self.sentences:
            yield from sentence


def validate_suffix_table(rules: tuple[tuple[str, int], ...]) -> None:
    """Check structural invariants of a suffix table.

    Raises ValueError on empty suffixes, non-positive minimum stem lengths,
    duplicate suffixes, or rules not sorted by descending suffix length.
    """
    seen: set[str] = set()
    previous_len: int | None = None
    for suffix, min_stem in rules:
        if not suffix:
            raise ValueError("suffix table: empty suffix")
        if min_stem < 1:
            raise ValueError(f"suffix table: rule {suffix!r} has min stem length < 1")
        if suffix in seen:
            raise ValueError(f"suffix table: duplicate suffix {suffix!r}")
        seen.add(suffix)
        if previous_len is not None and len(suffix) > previous_len:
            raise ValueError("suffix table: rules not sorted by descending suffix length")
        previous_len = len(suffix)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Load a stopword file: one token per line, '#' comments allowed."""
    words: set[str] = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            words.add(entry)
    return frozenset(words)


def load_suffix_table(path: str | Path) -> tuple[tuple[str, int], ...]:
    """Load suffix rules from a `<suffix>\\t<min_stem_length>` file.

    Rules are normalized to descending suffix length (ties broken
    lexicographically) and validated.
    """
    rules: list[tuple[str, int]] = []
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        entry = line.split("#", 1)[0].rstrip()
        if not entry.strip():
            continue
        parts = entry.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{line_no}: expected <suffix>\\t<min_stem_length>")
        suffix, raw_min = parts[0].strip(), parts[1].strip()
        try:
            min_stem = int(raw_min)
        except ValueError as exc:
            raise ValueError(f"{path}:{line_no}: min stem length is not an integer") from exc
        rules.append((suffix, min_stem))
    normalized = tuple(sorted(rules, key=lambda rule: (-len(rule[0]), rule[0])))
    validate_suffix_table(normalized)
    return normalized


@lru_cache(maxsize=1)
def default_config() -> PreprocessConfig:
    """The shipped default configuration (packaged data files)."""
    data = resources.files("doccat") / "data"
    with resources.as_file(data / "bengali_stopwords.txt") as stopword_path:
        stopwords = load_stopwords(stopword_path)
    with resources.as_file(data / "bengali_suffixes.tsv") as suffix_path:
        suffixes = load_suffix_table(suffix_path)
    return PreprocessConfig(stopword_list=stopwords, suffix_table=suffixes)


def split_sentences(text: str) -> list[str]:
    """Split on the Bengali danda, '?', '!', and newlines.

    Delimiters are removed, segments are trimmed, and empty segments are
    dropped.
    """
    return [stripped for segment in SENTENCE_SPLIT_RE.split(text) if (stripped := segment.strip())]


def tokenize(sentence: str) -> list[str]:
    """Split a sentence on Unicode whitespace, preserving token order."""
    return sentence.split()


def strip_symbols(token: str, strip_set: frozenset[str]) -> str:
    """Remove every character in `strip_set`; may return an empty string."""
    return "".join(ch for ch in token if ch not in strip_set)


def stem(token: str, suffix_table: tuple[tuple[str, int], ...]) -> str:
    """Strip at most one suffix: the longest rule whose removal leaves
    at least the rule's minimum stem length. Otherwise return unchanged."""
    for suffix, min_stem in suffix_table:
        if len(token) - len(suffix) >= min_stem and token.endswith(suffix):
            return token[: -len(suffix)]
    return token


def remove_stopwords(tokens: list[str], stopword_list: frozenset[str]) -> list[str]:
    """Filter exact stopword matches, preserving order."""
    return [token for token in tokens if token not in stopword_list]


def preprocess_document(doc: LabeledDocument, config: PreprocessConfig) -> TokenizedDocument:
    """Run the full pipeline over one document.

    Emptied tokens and emptied sentences are dropped; an all-stopword
    document yields a valid TokenizedDocument with zero tokens.
    """
    sentences: list[tuple[str, ...]] = []
    for raw_sentence in split_sentences(doc.text):
        tokens: list[str] = []
        for raw_token in tokenize(raw_sentence):
            token = strip_symbols(raw_token, config.strip_symbols)
            if not token:
                continue
            if config.lowercase_latin:
                token = token.lower()
            if config.enable_stemming:
                token = stem(token, config.suffix_table)
            tokens.append(token)
        if config.enable_stopwords:
            tokens = remove_stopwords(tokens, config.stopword_list)
        if tokens:
            sentences.append(tuple(tokens))
    return TokenizedDocument(sentences=tuple(sentences), label=doc.label, doc_id=doc.id)


def preprocess_corpus(corpus: LabeledCorpus, config: PreprocessConfig) -> list[TokenizedDocument]:
    """Preprocess every document, preserving corpus order."""
    return [preprocess_document(doc, config) for doc in corpus]


def tokenized_to_json(doc: TokenizedDocument) -> str:
    """One tokenized document as a JSON line: {"id", "label", "sentences"}."""
    return json.dumps(
        {
            "id": doc.doc_id,
            "label": doc.label,
            "sentences": [list(sentence) for sentence in doc.sentences],
        },
        ensure_ascii=False,
    )
