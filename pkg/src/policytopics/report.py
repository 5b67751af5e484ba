"""Self-contained SVG rendering: topic bar charts, theme word clouds, and
theme stream graphs.

Rendering is a pure function of (data, spec): fixed float formatting and a
seeded placement search make outputs byte-identical across runs. Text
extents are approximated as 0.6 * font_size per character, and the word
cloud's no-overlap guarantee is stated against that metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptyInputError, ParamError, PlacementError
from .evolve import StreamBand
from .themes import ThemeCatalog
from .topics import TopicCluster

DEFAULT_PALETTE = (
    "#4c78a8",
    "#f58518",
    "#e45756",
    "#72b7b2",
    "#54a24b",
    "#eeca3b",
    "#b279a2",
    "#ff9da6",
    "#9d755d",
    "#bab0ac",
)

CHAR_WIDTH = 0.6  # em approximation per character


@dataclass(frozen=True)
class RenderSpec:
    width: int = 900
    height: int = 600
    font_min: float = 12.0
    font_max: float = 48.0
    palette: tuple[str, ...] = field(default=DEFAULT_PALETTE)
    seed: int = 7

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ParamError("width and height must be positive")
        if not self.font_min < self.font_max:
            raise ParamError("font_min must be smaller than font_max")

    def color(self, i: int) -> str:
        return self.palette[i % len(self.palette)]


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _svg_open(spec: RenderSpec) -> str:
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{spec.width}" height="{spec.height}" '
        f'viewBox="0 0 {spec.width} {spec.height}">'
    )


def text_box(text: str, font: float, cx: float, cy: float) -> tuple[float, float, float, float]:
    """Axis-aligned bounding box of a centered label under the 0.6-em metric."""
    w = CHAR_WIDTH * font * len(text)
    h = font
    return cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0


def boxes_overlap(a, b) -> bool:
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def wordcloud_weights(cat: ThemeCatalog, spec: RenderSpec) -> list[tuple[str, float]]:
    """Linear map from theme count to font size; a flat catalog gets
    font_max everywhere."""
    if len(cat) == 0:
        raise EmptyInputError("empty theme catalog")
    counts = [e.count for e in cat.entries]
    lo, hi = min(counts), max(counts)
    out = []
    for entry in cat.entries:
        if hi == lo:
            font = spec.font_max
        else:
            font = spec.font_min + (entry.count - lo) * (spec.font_max - spec.font_min) / (hi - lo)
        out.append((entry.display, font))
    return out


def _place_words(
    weighted: list[tuple[str, float]], spec: RenderSpec
) -> list[tuple[str, float, float, float]]:
    """Seeded spiral search; shrinks every font by 10% per failed round,
    up to 5 retries."""
    rng = np.random.default_rng(spec.seed)
    cx0, cy0 = spec.width / 2.0, spec.height / 2.0
    start_angles = [float(rng.uniform(0.0, 2.0 * math.pi)) for _ in weighted]
    for attempt in range(6):
        scale = 0.9**attempt
        placed: list[tuple[str, float, float, float]] = []
        boxes: list[tuple[float, float, float, float]] = []
        failed = False
        for word_idx, (text, font0) in enumerate(weighted):
            font = font0 * scale
            theta0 = start_angles[word_idx]
            spot = None
            for step in range(6000):
                theta = theta0 + 0.22 * step
                radius = 0.9 * step * 0.22
                cx = cx0 + radius * math.cos(theta)
                cy = cy0 + 0.6 * radius * math.sin(theta)
                box = text_box(text, font, cx, cy)
                if box[0] < 0 or box[1] < 0 or box[2] > spec.width or box[3] > spec.height:
                    continue
                if any(boxes_overlap(box, other) for other in boxes):
                    continue
                spot = (text, font, cx, cy)
                boxes.append(box)
                break
            if spot is None:
                failed = True
                break
            placed.append(spot)
        if not failed:
            return placed
    raise PlacementError(f"could not place {len(weighted)} labels without overlap")


def wordcloud_svg(weighted: list[tuple[str, float]], spec: RenderSpec) -> str:
    """Non-overlapping theme labels on a seeded spiral."""
    if not weighted:
        raise EmptyInputError("nothing to render")
    placed = _place_words(weighted, spec)
    parts = [_svg_open(spec)]
    for i, (text, font, cx, cy) in enumerate(placed):
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" font-size="{_fmt(font)}" '
            f'font-family="sans-serif" text-anchor="middle" dominant-baseline="central" '
            f'fill="{spec.color(i)}">{escape(text)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def barchart_svg(topics: list[TopicCluster], top_k_topics: int, spec: RenderSpec) -> str:
    """Horizontal bars for the largest topics, annotated with top-5 terms."""
    if not topics:
        raise EmptyInputError("document has no topics")
    shown = sorted(topics, key=lambda t: (-t.size, t.topic_id))[:top_k_topics]
    max_size = max(t.size for t in shown)
    margin_left = 70.0
    margin = 20.0
    plot_w = spec.width - margin_left - margin
    row_h = (spec.height - 2 * margin) / len(shown)
    bar_h = row_h * 0.6
    parts = [_svg_open(spec)]
    for i, topic in enumerate(shown):
        y = margin + i * row_h
        width = plot_w * topic.size / max_size
        terms = ", ".join(term for term, _ in topic.top_terms[:5])
        label = f"topic {topic.topic_id}"
        parts.append(
            f'<rect x="{_fmt(margin_left)}" y="{_fmt(y)}" width="{_fmt(width)}" '
            f'height="{_fmt(bar_h)}" fill="{spec.color(i)}"/>'
        )
        parts.append(
            f'<text x="{_fmt(margin_left - 6)}" y="{_fmt(y + bar_h / 2)}" font-size="12" '
            f'font-family="sans-serif" text-anchor="end" dominant-baseline="central">'
            f"{escape(label)}</text>"
        )
        parts.append(
            f'<text x="{_fmt(margin_left + 4)}" y="{_fmt(y + bar_h + 12)}" font-size="11" '
            f'font-family="sans-serif" fill="#444">{escape(terms)} '
            f"({topic.size} sentences)</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts)


def streamgraph_svg(bands: list[StreamBand], spec: RenderSpec) -> str:
    """One filled path per theme plus a legend in selection order."""
    if not bands:
        raise EmptyInputError("nothing to render")
    years = sorted({year for band in bands for year, _, _ in band.spans})
    lo = min(min(y0 for _, y0, _ in band.spans) for band in bands)
    hi = max(max(y1 for _, _, y1 in band.spans) for band in bands)
    if hi <= lo:
        hi = lo + 1.0
    margin = 40.0
    legend_w = 180.0
    plot_w = spec.width - 2 * margin - legend_w
    plot_h = spec.height - 2 * margin

    def sx(year: int) -> float:
        if len(years) == 1:
            return margin + plot_w / 2.0
        return margin + plot_w * (year - years[0]) / (years[-1] - years[0])

    def sy(value: float) -> float:
        return margin + plot_h * (hi - value) / (hi - lo)

    parts = [_svg_open(spec)]
    for i, band in enumerate(bands):
        spans = {year: (y0, y1) for year, y0, y1 in band.spans}
        top = [(sx(year), sy(spans[year][1])) for year in years if year in spans]
        bottom = [(sx(year), sy(spans[year][0])) for year in reversed(years) if year in spans]
        points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in top + bottom)
        parts.append(f'<polygon points="{points}" fill="{spec.color(i)}" fill-opacity="0.85"/>')
    for i, band in enumerate(bands):
        ly = margin + 16.0 * i
        lx = spec.width - margin - legend_w
        parts.append(f'<rect x="{_fmt(lx)}" y="{_fmt(ly)}" width="12" height="12" fill="{spec.color(i)}"/>')
        parts.append(
            f'<text x="{_fmt(lx + 16)}" y="{_fmt(ly + 10)}" font-size="11" '
            f'font-family="sans-serif">{escape(band.theme)}</text>'
        )
    for year in years:
        parts.append(
            f'<text x="{_fmt(sx(year))}" y="{_fmt(spec.height - margin / 2)}" font-size="11" '
            f'font-family="sans-serif" text-anchor="middle">{year}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def wordcloud_json(weighted: list[tuple[str, float]]) -> list[dict]:
    return [{"theme": t, "font_size": round(f, 2)} for t, f in weighted]


def barchart_json(topics: list[TopicCluster], top_k_topics: int) -> list[dict]:
    shown = sorted(topics, key=lambda t: (-t.size, t.topic_id))[:top_k_topics]
    return [
        {
            "topic_id": t.topic_id,
            "size": t.size,
            "top_terms": [{"term": term, "weight": w} for term, w in t.top_terms],
        }
        for t in shown
    ]


def streamgraph_json(bands: list[StreamBand]) -> list[dict]:
    return [
        {
            "theme": band.theme,
            "spans": [{"year": year, "y0": y0, "y1": y1} for year, y0, y1 in band.spans],
        }
        for band in bands
    ]
