"""Labeled document corpora: loading, validation, and split statistics.

Two on-disk formats are supported:

* JSONL (the canonical interchange format): one JSON object per line with
  required string fields ``text`` and ``label`` and an optional ``id``.
  Blank lines are ignored.
* Directory-per-category: ``<root>/<label>/<file>.txt`` where each ``.txt``
  file is one UTF-8 document.

Corpora are immutable after construction and safe to share across threads.
Document order is load order for JSONL and ``(label, filename)``
lexicographic for directories, so downstream training is deterministic.
Invalid UTF-8 is a load error, never silently replaced: corrupted Bengali
text must fail loudly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DuplicateIdError,
    EmptyCorpusError,
    MalformedLineError,
    UnreadableFileError,
)
from .fileio import atomic_write_text


@dataclass(frozen=True)
class LabeledDocument:
    """One raw document with its category label."""

    id: str
    text: str
    label: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("document id must be non-empty")
        if not isinstance(self.text, str) or not self.text.strip():
            raise ValueError(f"document {self.id!r}: text must be a non-empty string")
        if not isinstance(self.label, str) or not self.label or "\n" in self.label:
            raise ValueError(f"document {self.id!r}: label must be non-empty without newlines")


@dataclass(frozen=True)
class LabeledCorpus:
    """An ordered collection of labeled documents with pairwise distinct ids."""

    documents: tuple[LabeledDocument, ...]
    labels: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for doc in self.documents:
            if doc.id in seen:
                raise DuplicateIdError(doc.id)
            seen.add(doc.id)
        object.__setattr__(
            self, "labels", tuple(sorted({doc.label for doc in self.documents}))
        )

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)


@dataclass(frozen=True)
class CategoryCounts:
    """Per-category document counts, mirroring a train/test split table."""

    per_label: dict[str, int]
    total: int


def load_jsonl(path: str | Path) -> LabeledCorpus:
    """Load a corpus from a JSONL file, preserving line order.

    A missing ``id`` field is synthesized as ``<filename>:<line-number>``.

    Raises:
        MalformedLineError: a non-blank line is not a JSON object with string
            ``text`` and ``label`` fields, or the document is invalid.
        DuplicateIdError: two lines carry the same id.
        EmptyCorpusError: the file holds no documents.
        UnreadableFileError: the file cannot be read or is not valid UTF-8.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UnreadableFileError(str(path), str(exc)) from exc
    except UnicodeDecodeError as exc:
        raise UnreadableFileError(str(path), f"invalid UTF-8: {exc}") from exc

    documents: list[LabeledDocument] = []
    # split on \n only: JSON strings may legally contain other Unicode line
    # boundaries (NEL, U+2028) that splitlines() would treat as line breaks
    for line_no, line in enumerate(raw.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLineError(str(path), line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise MalformedLineError(str(path), line_no, "line is not a JSON object")
        for key in ("text", "label"):
            if key not in obj:
                raise MalformedLineError(str(path), line_no, f"missing field {key!r}")
            if not isinstance(obj[key], str):
                raise MalformedLineError(str(path), line_no, f"field {key!r} is not a string")
        doc_id = obj.get("id")
        if doc_id is None:
            doc_id = f"{path.name}:{line_no}"
        elif not isinstance(doc_id, str):
            raise MalformedLineError(str(path), line_no, "field 'id' is not a string")
        try:
            documents.append(LabeledDocument(id=doc_id, text=obj["text"], label=obj["label"]))
        except ValueError as exc:
            raise MalformedLineError(str(path), line_no, str(exc)) from exc

    if not documents:
        raise EmptyCorpusError(f"no documents in {path}")
    return LabeledCorpus(documents=tuple(documents))


def save_jsonl(corpus: LabeledCorpus, path: str | Path) -> None:
    """Write a corpus as JSONL; re-loading yields an identical corpus."""
    lines = [
        json.dumps({"id": doc.id, "text": doc.text, "label": doc.label}, ensure_ascii=False)
        for doc in corpus
    ]
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_dir(path: str | Path) -> LabeledCorpus:
    """Load a directory-per-category corpus.

    The label is the subdirectory name and the id is ``<label>/<filename>``.
    Documents are ordered by ``(label, filename)`` lexicographically.

    Raises:
        NotADirectoryError: `path` is not a directory.
        UnreadableFileError: a ``.txt`` file cannot be read, is not UTF-8,
            or holds no text.
        EmptyCorpusError: no documents were found.
    """
    root = Path(path)
    if not root.is_dir():
        raise NotADirectoryError(f"not a directory: {root}")

    documents: list[LabeledDocument] = []
    for category_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        label = category_dir.name
        for txt in sorted(category_dir.glob("*.txt")):
            try:
                text = txt.read_text(encoding="utf-8")
            except OSError as exc:
                raise UnreadableFileError(str(txt), str(exc)) from exc
            except UnicodeDecodeError as exc:
                raise UnreadableFileError(str(txt), f"invalid UTF-8: {exc}") from exc
            try:
                documents.append(
                    LabeledDocument(id=f"{label}/{txt.name}", text=text, label=label)
                )
            except ValueError as exc:
                raise UnreadableFileError(str(txt), str(exc)) from exc

    if not documents:
        raise EmptyCorpusError(f"no documents under {root}")
    return LabeledCorpus(documents=tuple(documents))


def split_stats(corpus: LabeledCorpus) -> CategoryCounts:
    """Count documents once per label; totals match the corpus length."""
    per_label: dict[str, int] = {}
    for doc in corpus:
        per_label[doc.label] = per_label.get(doc.label, 0) + 1
    return CategoryCounts(per_label=per_label, total=len(corpus))
