"""Temporal analytics over theme assignments.

Counts are cluster-theme pairs grouped by document year, with pre/post era
totals taken from the manifest. Selected series feed a centered ("wiggle
free") stream layout used by the stream-graph renderer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .corpus import Document
from .errors import ParamError, ReferentialError
from .themes import ThemeAssignment, ThemeCatalog, catalog, normalize_theme


@dataclass(frozen=True)
class EvolutionSeries:
    theme: str  # display form
    points: tuple[tuple[int, int], ...]  # (year, count) sorted by year
    era_totals: tuple[int, int]  # (pre, post)

    @property
    def total(self) -> int:
        return sum(c for _, c in self.points)


@dataclass(frozen=True)
class StreamBand:
    theme: str
    spans: tuple[tuple[int, float, float], ...]  # (year, y0, y1)


def theme_by_year(
    assignments: list[ThemeAssignment], manifest: list[Document]
) -> list[EvolutionSeries]:
    """One series per distinct theme, ordered by normalized name."""
    docs = {d.doc_id: d for d in manifest}
    counts: dict[str, dict[int, int]] = {}
    eras: dict[str, list[int]] = {}
    display: dict[str, str] = {}
    for a in assignments:
        doc = docs.get(a.doc_id)
        if doc is None:
            raise ReferentialError(f"assignment references unknown doc_id {a.doc_id!r}")
        for theme in a.themes:
            key = normalize_theme(theme)
            display.setdefault(key, theme.strip())
            counts.setdefault(key, {})
            counts[key][doc.year] = counts[key].get(doc.year, 0) + 1
            eras.setdefault(key, [0, 0])
            eras[key][0 if doc.era == "pre_ai_act" else 1] += 1
    return [
        EvolutionSeries(
            theme=display[key],
            points=tuple(sorted(counts[key].items())),
            era_totals=tuple(eras[key]),
        )
        for key in sorted(counts)
    ]


def split_by_era(
    assignments: list[ThemeAssignment], manifest: list[Document]
) -> tuple[ThemeCatalog, ThemeCatalog]:
    """Theme catalogs restricted to pre- and post-era documents."""
    docs = {d.doc_id: d for d in manifest}
    pre, post = [], []
    for a in assignments:
        doc = docs.get(a.doc_id)
        if doc is None:
            raise ReferentialError(f"assignment references unknown doc_id {a.doc_id!r}")
        (pre if doc.era == "pre_ai_act" else post).append(a)
    return catalog(pre), catalog(post)


def select_series(
    series: list[EvolutionSeries], k: int, direction: str = "top"
) -> list[EvolutionSeries]:
    """k series ranked by total count (desc for top, asc for bottom), ties
    broken lexicographically; all series when fewer than k exist."""
    if k < 1:
        raise ParamError("k must be >= 1")
    if direction not in ("top", "bottom"):
        raise ParamError(f"direction must be top or bottom, got {direction!r}")
    sign = -1 if direction == "top" else 1
    ranked = sorted(series, key=lambda s: (sign * s.total, normalize_theme(s.theme)))
    return ranked[:k]


def stream_layout(series: list[EvolutionSeries]) -> list[StreamBand]:
    """Symmetric stacked bands: at each year the bands stack in selection
    order and the total height is centered on zero; missing years get
    zero-thickness spans."""
    if not series:
        raise ParamError("need at least one series")
    years = sorted({year for s in series for year, _ in s.points})
    by_year = [{year: count for year, count in s.points} for s in series]
    bands: list[list[tuple[int, float, float]]] = [[] for _ in series]
    for year in years:
        total = sum(per.get(year, 0) for per in by_year)
        y = -total / 2.0
        for i, per in enumerate(by_year):
            count = per.get(year, 0)
            bands[i].append((year, y, y + count))
            y += count
    return [StreamBand(s.theme, tuple(bands[i])) for i, s in enumerate(series)]


def evolution_to_json(series: list[EvolutionSeries]) -> str:
    payload = [
        {
            "theme": s.theme,
            "points": [{"year": y, "count": c} for y, c in s.points],
            "era": {"pre": s.era_totals[0], "post": s.era_totals[1]},
        }
        for s in series
    ]
    return json.dumps(payload, indent=2, ensure_ascii=False)


def write_evolution_json(series: list[EvolutionSeries], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(evolution_to_json(series) + "\n")
