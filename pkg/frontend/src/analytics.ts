import type { EvolutionSeries, ThemeCount } from "./types.js";

// Presentation-only transforms: every count below comes verbatim from an
// API payload field; the client never re-derives counts from raw data.

export type EraTab = "all" | "pre" | "post";

/** Counts for one era tab, taken from the evolution payload's era fields. */
export function eraCatalog(series: EvolutionSeries[], tab: "pre" | "post"): ThemeCount[] {
  return series
    .map((s) => ({ theme: s.theme, count: tab === "pre" ? s.era.pre : s.era.post }))
    .filter((e) => e.count > 0)
    .sort((a, b) => b.count - a.count || a.theme.localeCompare(b.theme));
}

export type SizedTheme = { theme: string; count: number; fontPx: number };

/** Linear count -> font-size map; a flat catalog renders at fontMax. */
export function wordCloudSizes(
  entries: ThemeCount[],
  fontMin = 12,
  fontMax = 40,
): SizedTheme[] {
  if (entries.length === 0) return [];
  const counts = entries.map((e) => e.count);
  const lo = Math.min(...counts);
  const hi = Math.max(...counts);
  return entries.map((e) => ({
    theme: e.theme,
    count: e.count,
    fontPx: hi === lo ? fontMax : fontMin + ((e.count - lo) * (fontMax - fontMin)) / (hi - lo),
  }));
}

export type Band = {
  theme: string;
  spans: { year: number; y0: number; y1: number }[];
};

/** Centered stacked bands in series order; missing years get zero spans. */
export function streamBands(series: EvolutionSeries[]): Band[] {
  const years = [...new Set(series.flatMap((s) => s.points.map((p) => p.year)))].sort(
    (a, b) => a - b,
  );
  const perSeries = series.map((s) => new Map(s.points.map((p) => [p.year, p.count])));
  const bands: Band[] = series.map((s) => ({ theme: s.theme, spans: [] }));
  for (const year of years) {
    const total = perSeries.reduce((acc, m) => acc + (m.get(year) ?? 0), 0);
    let y = -total / 2;
    perSeries.forEach((m, i) => {
      const count = m.get(year) ?? 0;
      bands[i].spans.push({ year, y0: y, y1: y + count });
      y += count;
    });
  }
  return bands;
}

/** SVG polygon points for one band, in [0,width]x[0,height] screen space. */
export function bandPolygon(
  band: Band,
  years: number[],
  valueRange: { lo: number; hi: number },
  width: number,
  height: number,
): string {
  const span = valueRange.hi - valueRange.lo || 1;
  const sx = (year: number) =>
    years.length === 1
      ? width / 2
      : ((year - years[0]) / (years[years.length - 1] - years[0])) * width;
  const sy = (v: number) => ((valueRange.hi - v) / span) * height;
  const top = band.spans.map((s) => `${sx(s.year).toFixed(1)},${sy(s.y1).toFixed(1)}`);
  const bottom = [...band.spans].reverse().map((s) => `${sx(s.year).toFixed(1)},${sy(s.y0).toFixed(1)}`);
  return [...top, ...bottom].join(" ");
}

export function bandsValueRange(bands: Band[]): { lo: number; hi: number } {
  let lo = 0;
  let hi = 0;
  for (const band of bands) {
    for (const s of band.spans) {
      lo = Math.min(lo, s.y0);
      hi = Math.max(hi, s.y1);
    }
  }
  return { lo, hi };
}
