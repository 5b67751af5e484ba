"""Expert theme assignments for topic clusters.

An assignment attaches up to three themes to one cluster, or flags it as
incoherent (in which case it carries no themes). Theme identity is the
trimmed, case-folded name; the display form is preserved from first use.
Two annotator passes can be merged, with disagreements reported instead of
auto-resolved.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import (
    EmptyInputError,
    FormatError,
    InconsistentAssignment,
    NotFound,
    TooManyThemes,
)

ASSIGNMENTS_HEADER = ["doc_id", "topic_id", "coherent", "theme1", "theme2", "theme3", "annotator"]
THEMES_HEADER = ["theme", "count"]
MAX_THEMES = 3


@dataclass(frozen=True)
class ThemeAssignment:
    doc_id: str
    topic_id: int
    coherent: bool
    themes: tuple[str, ...]  # display forms, at most MAX_THEMES
    annotator: str

    @property
    def theme_keys(self) -> frozenset[str]:
        return frozenset(normalize_theme(t) for t in self.themes)


@dataclass(frozen=True)
class ThemeEntry:
    key: str
    display: str
    count: int
    per_doc: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class ThemeCatalog:
    entries: tuple[ThemeEntry, ...]  # ordered by (count desc, key asc)

    @property
    def total_count(self) -> int:
        return sum(e.count for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class ThemeConflict:
    doc_id: str
    topic_id: int
    themes_a: tuple[str, ...]
    themes_b: tuple[str, ...]


@dataclass(frozen=True)
class MergeResult:
    consolidated: tuple[ThemeAssignment, ...]
    conflicts: tuple[ThemeConflict, ...]
    single_coverage: tuple[tuple[str, int], ...]  # topics seen by one annotator only


@dataclass(frozen=True)
class DocumentSummary:
    doc_id: str
    cluster_count: int
    theme_count: int
    key_themes: tuple[str, ...]


def normalize_theme(name: str) -> str:
    return name.strip().casefold()


def make_assignment(
    doc_id: str,
    topic_id: int,
    themes,
    coherent: bool,
    annotator: str,
    known_topics: set[tuple[str, int]] | None = None,
) -> ThemeAssignment:
    """Validate and normalize one assignment.

    ``known_topics`` enables the referenced-topic existence check; duplicate
    theme names (case-insensitively) collapse to the first spelling.
    """
    if known_topics is not None and (doc_id, topic_id) not in known_topics:
        raise NotFound(f"unknown topic {doc_id}/{topic_id}")
    display: list[str] = []
    seen: set[str] = set()
    for raw in themes:
        name = str(raw).strip()
        if not name:
            continue
        key = normalize_theme(name)
        if key not in seen:
            seen.add(key)
            display.append(name)
    if len(display) > MAX_THEMES:
        raise TooManyThemes(f"{len(display)} themes assigned; the maximum is {MAX_THEMES}")
    if not coherent and display:
        raise InconsistentAssignment("an incoherent cluster cannot carry themes")
    return ThemeAssignment(doc_id, int(topic_id), bool(coherent), tuple(display), annotator)


class AnnotationStore:
    """In-memory assignment store keyed by (doc_id, topic_id, annotator),
    with CSV persistence. Re-assignment by the same annotator overwrites."""

    def __init__(self):
        self._entries: dict[tuple[str, int, str], ThemeAssignment] = {}

    def assign(
        self,
        doc_id: str,
        topic_id: int,
        themes,
        coherent: bool,
        annotator: str,
        known_topics: set[tuple[str, int]] | None = None,
    ) -> ThemeAssignment:
        entry = make_assignment(doc_id, topic_id, themes, coherent, annotator, known_topics)
        self._entries[(entry.doc_id, entry.topic_id, entry.annotator)] = entry
        return entry

    def remove_document(self, doc_id: str) -> list[ThemeAssignment]:
        removed = [a for key, a in self._entries.items() if key[0] == doc_id]
        for a in removed:
            del self._entries[(a.doc_id, a.topic_id, a.annotator)]
        return removed

    def all(self) -> list[ThemeAssignment]:
        return [self._entries[k] for k in sorted(self._entries)]

    def for_annotator(self, annotator: str) -> list[ThemeAssignment]:
        return [a for a in self.all() if a.annotator == annotator]

    def save(self, path) -> None:
        write_assignments(self.all(), path)

    @classmethod
    def load(cls, path) -> "AnnotationStore":
        store = cls()
        for a in read_assignments(path):
            store._entries[(a.doc_id, a.topic_id, a.annotator)] = a
        return store


def write_assignments(assignments: list[ThemeAssignment], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ASSIGNMENTS_HEADER)
        for a in assignments:
            themes = list(a.themes) + [""] * (MAX_THEMES - len(a.themes))
            writer.writerow(
                [a.doc_id, a.topic_id, "true" if a.coherent else "false", *themes, a.annotator]
            )


def read_assignments(path) -> list[ThemeAssignment]:
    out: list[ThemeAssignment] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ASSIGNMENTS_HEADER:
            raise FormatError(f"bad assignments header: {header!r}")
        for row in reader:
            if not row:
                continue
            doc_id, topic_id, coherent_s, t1, t2, t3, annotator = row
            if coherent_s not in ("true", "false"):
                raise FormatError(f"bad coherent flag {coherent_s!r}")
            out.append(
                make_assignment(
                    doc_id,
                    int(topic_id),
                    [t for t in (t1, t2, t3) if t],
                    coherent_s == "true",
                    annotator,
                )
            )
    return out


def merge_annotators(
    a: list[ThemeAssignment], b: list[ThemeAssignment]
) -> MergeResult:
    """Merge two independent annotation passes.

    Identical normalized theme sets (and matching coherence) consolidate
    under annotator "joint"; disagreements become conflict records for a
    human session. Topics covered by a single pass are taken as-is and
    reported separately.
    """
    by_a = {(x.doc_id, x.topic_id): x for x in a}
    by_b = {(x.doc_id, x.topic_id): x for x in b}
    consolidated: list[ThemeAssignment] = []
    conflicts: list[ThemeConflict] = []
    single: list[tuple[str, int]] = []
    for key in sorted(set(by_a) | set(by_b)):
        in_a, in_b = by_a.get(key), by_b.get(key)
        if in_a is not None and in_b is not None:
            if in_a.theme_keys == in_b.theme_keys and in_a.coherent == in_b.coherent:
                consolidated.append(
                    ThemeAssignment(in_a.doc_id, in_a.topic_id, in_a.coherent, in_a.themes, "joint")
                )
            else:
                conflicts.append(
                    ThemeConflict(key[0], key[1], in_a.themes, in_b.themes)
                )
        else:
            present = in_a if in_a is not None else in_b
            consolidated.append(present)
            single.append(key)
    return MergeResult(tuple(consolidated), tuple(conflicts), tuple(single))


def catalog(assignments: list[ThemeAssignment]) -> ThemeCatalog:
    """Distinct normalized themes with cluster counts, ordered by
    (count desc, name asc)."""
    display: dict[str, str] = {}
    counts: dict[str, int] = {}
    per_doc: dict[str, dict[str, int]] = {}
    for a in assignments:
        for theme in a.themes:
            key = normalize_theme(theme)
            display.setdefault(key, theme.strip())
            counts[key] = counts.get(key, 0) + 1
            per_doc.setdefault(key, {})
            per_doc[key][a.doc_id] = per_doc[key].get(a.doc_id, 0) + 1
    entries = [
        ThemeEntry(
            key=key,
            display=display[key],
            count=counts[key],
            per_doc=tuple(sorted(per_doc[key].items())),
        )
        for key in counts
    ]
    entries.sort(key=lambda e: (-e.count, e.key))
    return ThemeCatalog(tuple(entries))


def incoherence_rate(assignments: list[ThemeAssignment]) -> float:
    if not assignments:
        raise EmptyInputError("no assignments")
    return sum(1 for a in assignments if not a.coherent) / len(assignments)


def document_summary(
    assignments: list[ThemeAssignment], cluster_counts: dict[str, int]
) -> list[DocumentSummary]:
    """Per-document cluster count, distinct theme count, and themes ordered
    by within-document frequency then name."""
    themes_per_doc: dict[str, dict[str, int]] = {doc: {} for doc in cluster_counts}
    display: dict[str, str] = {}
    for a in assignments:
        bucket = themes_per_doc.setdefault(a.doc_id, {})
        for theme in a.themes:
            key = normalize_theme(theme)
            display.setdefault(key, theme.strip())
            bucket[key] = bucket.get(key, 0) + 1
    out = []
    for doc_id in sorted(themes_per_doc):
        bucket = themes_per_doc[doc_id]
        ordered = sorted(bucket.items(), key=lambda kv: (-kv[1], kv[0]))
        out.append(
            DocumentSummary(
                doc_id=doc_id,
                cluster_count=cluster_counts.get(doc_id, 0),
                theme_count=len(bucket),
                key_themes=tuple(display[k] for k, _ in ordered),
            )
        )
    return out


def write_catalog_csv(cat: ThemeCatalog, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(THEMES_HEADER)
        for entry in cat.entries:
            writer.writerow([entry.display, entry.count])


def paper_fixture_path() -> Path:
    return Path(str(resources.files("policytopics").joinpath("fixtures/paper_table2.csv")))


def load_paper_fixture(path=None) -> list[DocumentSummary]:
    """Shipped per-document topic/theme bookkeeping from the source study."""
    if path is None:
        path = paper_fixture_path()
    out: list[DocumentSummary] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["doc_id", "clusters", "themes", "key_themes"]:
            raise FormatError(f"bad fixture header: {header!r}")
        for row in reader:
            if not row:
                continue
            doc_id, clusters, themes_n, key_themes = row
            out.append(
                DocumentSummary(
                    doc_id=doc_id,
                    cluster_count=int(clusters),
                    theme_count=int(themes_n),
                    key_themes=tuple(t.strip() for t in key_themes.split(";") if t.strip()),
                )
            )
    return out


def distinct_fixture_themes(summaries: list[DocumentSummary]) -> int:
    """Distinct normalized key themes across all fixture rows."""
    return len({normalize_theme(t) for s in summaries for t in s.key_themes})
