"""Feature engineering: vocabularies, TF-IDF vectors, and chi-square selection.

Two pipelines are provided and used separately downstream:

* TF-IDF: raw term counts weighted by the smoothed inverse document
  frequency ``ln((N + 1) / (DF + 1)) + 1`` and scaled to unit Euclidean
  norm (length normalization).
* Chi-square: a per-document co-occurrence score ranks each document's
  terms; the top share of every document's ranking is kept and the union
  forms the vocabulary, vectorized with raw counts.

The chi-square score for a term w in one document treats each sentence as
the co-occurrence window:

    score(w) = sum over g of (freq(w, g) - p_g * n_w)^2 / (p_g * n_w)

where g ranges over the document's other distinct terms, freq(w, g) is the
number of sentences containing both w and g, p_g is g's share of the
document's tokens, and n_w is the total token count of the sentences
containing w. Note on n_w: a narrower reading of this family of scores
takes n_w to be w's own frequency within its sentences; this implementation
deliberately uses the total-token count so that p_g * n_w is the expected
co-occurrence frequency, which is what the squared deviation is measured
against. A term that appears in long sentences therefore co-occurs with
more terms and scores as more important.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal, Sequence

from .errors import EmptyVocabularyError
from .fileio import atomic_write_text
from .textprep import TokenizedDocument

ChiScoreTable = dict[str, float]

FeatureMode = Literal["tfidf", "counts"]


@dataclass(frozen=True)
class Vocabulary:
    """Term to feature-index map with document frequencies.

    Indices are dense 0-based and assigned in lexicographic term order, so
    the same documents always produce the same feature space.
    """

    terms: dict[str, int]
    doc_freq: dict[str, int]
    n_docs: int

    def __post_init__(self) -> None:
        if set(self.terms.values()) != set(range(len(self.terms))):
            raise ValueError("vocabulary indices must be dense 0..V-1")
        if set(self.doc_freq) != set(self.terms):
            raise ValueError("doc_freq keys must match terms")
        for term, df in self.doc_freq.items():
            if not 1 <= df <= self.n_docs:
                raise ValueError(f"term {term!r}: DF {df} outside [1, {self.n_docs}]")

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.terms


@dataclass(frozen=True)
class SparseVector:
    """Index/weight pairs in strictly ascending index order, zeros omitted."""

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        previous = -1
        for index, weight in self.entries:
            if index <= previous:
                raise ValueError("sparse vector indices must be strictly ascending")
            if index < 0:
                raise ValueError("sparse vector index must be non-negative")
            if weight == 0.0 or not math.isfinite(weight):
                raise ValueError("sparse vector weights must be finite and non-zero")
            previous = index

    def norm(self) -> float:
        return math.sqrt(sum(weight * weight for _, weight in self.entries))

    def max_index(self) -> int:
        """Largest stored index, or -1 for the empty vector."""
        return self.entries[-1][0] if self.entries else -1

    def __len__(self) -> int:
        return len(self.entries)


EMPTY_VECTOR = SparseVector(entries=())


def build_vocabulary(docs: Sequence[TokenizedDocument], min_df: int = 1) -> Vocabulary:
    """Collect all distinct tokens with document frequency >= min_df.

    Raises EmptyVocabularyError if nothing survives the threshold.
    """
    if not docs:
        raise ValueError("cannot build a vocabulary from zero documents")
    doc_freq: Counter[str] = Counter()
    for doc in docs:
        doc_freq.update(set(doc.tokens()))
    kept = sorted(term for term, df in doc_freq.items() if df >= min_df)
    if not kept:
        raise EmptyVocabularyError(f"no term reaches document frequency {min_df}")
    return Vocabulary(
        terms={term: index for index, term in enumerate(kept)},
        doc_freq={term: doc_freq[term] for term in kept},
        n_docs=len(docs),
    )


def idf(n_docs: int, df: int) -> float:
    """Smoothed inverse document frequency: ln((N + 1) / (DF + 1)) + 1.

    Equals exactly 1.0 when a term appears in every document and grows as
    the term gets rarer. Raises ValueError outside 1 <= df <= n_docs.
    """
    if df < 1 or df > n_docs:
        raise ValueError(f"DF must satisfy 1 <= DF <= N, got DF={df}, N={n_docs}")
    return math.log((n_docs + 1) / (df + 1)) + 1.0


def count_vector(doc: TokenizedDocument, vocab: Vocabulary) -> SparseVector:
    """Raw in-vocabulary term counts; out-of-vocabulary tokens are ignored."""
    counts = Counter(token for token in doc.tokens() if token in vocab.terms)
    entries = sorted((vocab.terms[term], float(count)) for term, count in counts.items())
    return SparseVector(entries=tuple(entries))


def tfidf_vector(doc: TokenizedDocument, vocab: Vocabulary) -> SparseVector:
    """TF-IDF weights scaled to unit Euclidean norm.

    An input with no in-vocabulary token yields the empty vector and no
    normalization is attempted.
    """
    counts = Counter(token for token in doc.tokens() if token in vocab.terms)
    if not counts:
        return EMPTY_VECTOR
    weighted = {
        vocab.terms[term]: count * idf(vocab.n_docs, vocab.doc_freq[term])
        for term, count in counts.items()
    }
    norm = math.sqrt(sum(weight * weight for weight in weighted.values()))
    entries = sorted((index, weight / norm) for index, weight in weighted.items())
    return SparseVector(entries=tuple(entries))


def chi_score_document(doc: TokenizedDocument, g_top_k: int | None = None) -> ChiScoreTable:
    """Score every distinct term of one document by sentence co-occurrence.

    For each term w, the squared deviation of observed sentence-level
    co-occurrence from its expectation p_g * n_w is summed over the
    document's other distinct terms g (see the module docstring for the
    exact quantities). `g_top_k` optionally restricts g to the document's
    k most frequent terms (ties broken lexicographically); the default
    uses all terms.

    An empty document yields an empty table; a term with no co-occurring
    terms scores 0.
    """
    token_counts = Counter(doc.tokens())
    total_tokens = sum(token_counts.values())
    if total_tokens == 0:
        return {}

    sentence_sets = [frozenset(sentence) for sentence in doc.sentences]
    sentence_lengths = [len(sentence) for sentence in doc.sentences]

    if g_top_k is None:
        g_candidates = set(token_counts)
    else:
        ranked = sorted(token_counts, key=lambda term: (-token_counts[term], term))
        g_candidates = set(ranked[: max(g_top_k, 0)])

    scores: ChiScoreTable = {}
    for w in token_counts:
        containing = [i for i, terms in enumerate(sentence_sets) if w in terms]
        n_w = sum(sentence_lengths[i] for i in containing)
        score = 0.0
        for g in g_candidates:
            if g == w:
                continue
            expected = (token_counts[g] / total_tokens) * n_w
            if expected <= 0.0:
                continue
            observed = sum(1 for i in containing if g in sentence_sets[i])
            score += (observed - expected) ** 2 / expected
        scores[w] = score
    return scores


def select_chi_features(
    docs: Sequence[TokenizedDocument],
    top_percent: float,
    g_top_k: int | None = None,
) -> Vocabulary:
    """Keep each document's top share of chi-scored terms; union the keeps.

    Per document, terms are ranked by score descending (ties broken
    lexicographically) and the first ceil(top_percent/100 * distinct-term
    count) survive. Document frequencies and N in the returned vocabulary
    are computed over the full `docs` list. With top_percent=100 the result
    is identical to build_vocabulary(docs, min_df=1).
    """
    if not docs:
        raise ValueError("cannot select features from zero documents")
    if not 0.0 < top_percent <= 100.0:
        raise ValueError(f"top_percent must be in (0, 100], got {top_percent}")

    kept_terms: set[str] = set()
    for doc in docs:
        table = chi_score_document(doc, g_top_k=g_top_k)
        if not table:
            continue
        keep = math.ceil(top_percent * len(table) / 100.0)
        ranked = sorted(table.items(), key=lambda item: (-item[1], item[0]))
        kept_terms.update(term for term, _ in ranked[:keep])

    if not kept_terms:
        raise EmptyVocabularyError("chi-square selection kept no terms (all documents empty)")

    doc_freq: Counter[str] = Counter()
    for doc in docs:
        doc_freq.update(set(doc.tokens()) & kept_terms)
    ordered = sorted(kept_terms)
    return Vocabulary(
        terms={term: index for index, term in enumerate(ordered)},
        doc_freq={term: doc_freq[term] for term in ordered},
        n_docs=len(docs),
    )


def vectorize_corpus(
    docs: Sequence[TokenizedDocument], vocab: Vocabulary, mode: FeatureMode
) -> list[SparseVector]:
    """Map the chosen vectorizer over `docs`, preserving order."""
    if mode == "tfidf":
        return [tfidf_vector(doc, vocab) for doc in docs]
    if mode == "counts":
        return [count_vector(doc, vocab) for doc in docs]
    raise ValueError(f"unknown feature mode: {mode!r}")


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    """Write a vocabulary as `#ndocs=<N>` plus `<term>\\t<index>\\t<df>` lines."""
    lines = [f"#ndocs={vocab.n_docs}"]
    for term, index in sorted(vocab.terms.items(), key=lambda item: item[1]):
        lines.append(f"{term}\t{index}\t{vocab.doc_freq[term]}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_vocabulary(path: str | Path) -> Vocabulary:
    """Read a vocabulary written by save_vocabulary."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#ndocs="):
        raise ValueError(f"{path}: missing #ndocs= header")
    n_docs = int(lines[0].removeprefix("#ndocs="))
    terms: dict[str, int] = {}
    doc_freq: dict[str, int] = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        term, index, df = line.split("\t")
        terms[term] = int(index)
        doc_freq[term] = int(df)
    return Vocabulary(terms=terms, doc_freq=doc_freq, n_docs=n_docs)


def write_vectors(
    path: str | Path, doc_ids: Iterable[str], vectors: Iterable[SparseVector]
) -> None:
    """Debug export: one `<doc_id>\\t<index>:<weight> ...` line per document."""
    lines = []
    for doc_id, vector in zip(doc_ids, vectors):
        pairs = " ".join(f"{index}:{weight!r}" for index, weight in vector.entries)
        lines.append(f"{doc_id}\t{pairs}")
    atomic_write_text(path, "\n".join(lines) + "\n")
