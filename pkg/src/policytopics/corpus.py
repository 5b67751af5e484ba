"""Document manifest handling and sentence-level corpus ingestion.

A corpus lives in a project directory as two CSV files: ``manifest.csv``
(one row per document with issuer/type/year/era metadata) and
``sentences.csv`` (one row per sentence, ordered within each document).
Sentence splitting is rule based and deterministic: a shipped abbreviation
list guards terminators that do not end a sentence.
"""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import EmptyDocumentError, ManifestError

DOC_TYPES = ("recommendation", "guideline", "legislation", "code_of_practice")
ERAS = ("pre_ai_act", "post_ai_act")

MANIFEST_HEADER = ["doc_id", "title", "issuer", "doc_type", "year", "era"]
SENTENCES_HEADER = ["doc_id", "sentence_index", "text"]

_TERMINATORS = ".!?"


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    issuer: str
    doc_type: str
    year: int
    era: str


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    index: int
    text: str


def default_abbreviations() -> frozenset[str]:
    """Shipped abbreviation list, lowercased, each entry ending in a period."""
    text = resources.files("policytopics").joinpath("data/abbreviations.txt").read_text("utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


def paper_manifest_path() -> Path:
    """Path of the shipped eight-document manifest."""
    return Path(str(resources.files("policytopics").joinpath("fixtures/manifest.csv")))


def load_manifest(path) -> list[Document]:
    """Load and validate ``manifest.csv``; order of rows is preserved."""
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != MANIFEST_HEADER:
            raise ManifestError(f"bad manifest header: {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(MANIFEST_HEADER):
                raise ManifestError(f"row {lineno}: expected {len(MANIFEST_HEADER)} fields, got {len(row)}")
            doc_id, title, issuer, doc_type, year_s, era = row
            if not doc_id:
                raise ManifestError(f"row {lineno}: missing doc_id")
            if doc_id in seen:
                raise ManifestError(f"row {lineno}: duplicate doc_id {doc_id!r}")
            if doc_type not in DOC_TYPES:
                raise ManifestError(f"row {lineno}: unknown doc_type {doc_type!r}")
            if era not in ERAS:
                raise ManifestError(f"row {lineno}: unknown era {era!r}")
            try:
                year = int(year_s)
            except ValueError:
                raise ManifestError(f"row {lineno}: bad year {year_s!r}") from None
            seen.add(doc_id)
            docs.append(Document(doc_id, title, issuer, doc_type, year, era))
    return docs


def save_manifest(docs: list[Document], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for d in docs:
            writer.writerow([d.doc_id, d.title, d.issuer, d.doc_type, d.year, d.era])


def _abbreviation_before(text: str, dot: int, abbreviations: frozenset[str]) -> bool:
    """True when the period at ``dot`` terminates a listed abbreviation.

    The candidate entry is the run of letters and periods ending at ``dot``,
    e.g. ``"(Art." -> "art."`` and ``"e.g." -> "e.g."``.
    """
    start = dot
    while start > 0 and (text[start - 1].isalpha() or text[start - 1] == "."):
        start -= 1
    candidate = text[start : dot + 1].lower().lstrip(".")
    return bool(candidate) and candidate in abbreviations


def split_sentences(text: str, abbreviations: frozenset[str] | None = None) -> list[str]:
    """Split plain text into trimmed sentences.

    A boundary sits after ``.``, ``!`` or ``?`` when followed by whitespace
    and then an uppercase letter or a digit, unless the terminator ends an
    abbreviation-list entry. Empty pieces are dropped.
    """
    if abbreviations is None:
        abbreviations = default_abbreviations()
    out: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS:
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            follows_break = j > i + 1 and j < n and (text[j].isupper() or text[j].isdigit())
            if follows_break and not (ch == "." and _abbreviation_before(text, i, abbreviations)):
                piece = text[start : i + 1].strip()
                if piece:
                    out.append(piece)
                start = j
                i = j
                continue
        i += 1
    tail = text[start:].strip()
    if tail:
        out.append(tail)
    return out


def ingest_document(
    doc: Document,
    text: str,
    sentences_path,
    abbreviations: frozenset[str] | None = None,
) -> list[Sentence]:
    """Split ``text`` and persist the document's sentences.

    Existing rows for ``doc.doc_id`` are replaced; the file is rewritten
    atomically so concurrent readers never observe a half-written state.
    """
    pieces = split_sentences(text, abbreviations)
    if not pieces:
        raise EmptyDocumentError(f"document {doc.doc_id!r} has no sentences")
    sentences = [Sentence(doc.doc_id, i, s) for i, s in enumerate(pieces)]
    existing = [s for s in read_sentences(sentences_path) if s.doc_id != doc.doc_id]
    write_sentences(existing + sentences, sentences_path)
    return sentences


def read_sentences(path) -> list[Sentence]:
    if not os.path.exists(path):
        return []
    out: list[Sentence] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is not None and header != SENTENCES_HEADER:
            raise ManifestError(f"bad sentences header: {header!r}")
        for row in reader:
            if not row:
                continue
            out.append(Sentence(row[0], int(row[1]), row[2]))
    return out


def write_sentences(sentences: list[Sentence], path) -> None:
    """Atomic whole-file rewrite (write temp + rename)."""
    path = str(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(SENTENCES_HEADER)
            for s in sentences:
                writer.writerow([s.doc_id, s.index, s.text])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sentences_for(sentences: list[Sentence], doc_id: str) -> list[Sentence]:
    """Sentences of one document, ordered by index."""
    return sorted((s for s in sentences if s.doc_id == doc_id), key=lambda s: s.index)
