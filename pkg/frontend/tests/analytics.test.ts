import { describe, expect, it } from "vitest";

import {
  bandPolygon,
  bandsValueRange,
  eraCatalog,
  streamBands,
  wordCloudSizes,
} from "../src/analytics.js";
import type { EvolutionSeries } from "../src/types.js";

const series: EvolutionSeries[] = [
  { theme: "Risk", points: [{ year: 2019, count: 3 }, { year: 2024, count: 2 }], era: { pre: 3, post: 2 } },
  { theme: "Copyright", points: [{ year: 2020, count: 1 }], era: { pre: 1, post: 0 } },
  { theme: "Sandbox", points: [{ year: 2024, count: 4 }], era: { pre: 0, post: 4 } },
];

describe("eraCatalog", () => {
  it("takes pre counts verbatim from the payload", () => {
    expect(eraCatalog(series, "pre")).toEqual([
      { theme: "Risk", count: 3 },
      { theme: "Copyright", count: 1 },
    ]);
  });

  it("drops zero-count themes in the other era", () => {
    const post = eraCatalog(series, "post");
    expect(post.map((e) => e.theme)).toEqual(["Sandbox", "Risk"]);
  });
});

describe("wordCloudSizes", () => {
  it("maps counts linearly between fontMin and fontMax", () => {
    const sized = wordCloudSizes(
      [
        { theme: "a", count: 1 },
        { theme: "b", count: 2 },
        { theme: "c", count: 3 },
      ],
      10,
      30,
    );
    expect(sized.map((s) => s.fontPx)).toEqual([10, 20, 30]);
  });

  it("renders a flat catalog at fontMax", () => {
    const sized = wordCloudSizes([{ theme: "a", count: 2 }, { theme: "b", count: 2 }], 10, 30);
    expect(sized.every((s) => s.fontPx === 30)).toBe(true);
  });

  it("handles an empty catalog", () => {
    expect(wordCloudSizes([])).toEqual([]);
  });
});

describe("streamBands", () => {
  it("centers the stack and conserves totals per year", () => {
    const bands = streamBands(series);
    const years = [2019, 2020, 2024];
    for (const year of years) {
      const spans = bands.map((b) => b.spans.find((s) => s.year === year)!);
      const total = spans.reduce((acc, s) => acc + (s.y1 - s.y0), 0);
      const expected = series.reduce(
        (acc, s) => acc + (s.points.find((p) => p.year === year)?.count ?? 0),
        0,
      );
      expect(total).toBeCloseTo(expected, 12);
      expect(Math.min(...spans.map((s) => s.y0))).toBeCloseTo(-expected / 2, 12);
      expect(Math.max(...spans.map((s) => s.y1))).toBeCloseTo(expected / 2, 12);
    }
  });

  it("stacks adjacent bands without gaps", () => {
    const bands = streamBands(series);
    for (let i = 0; i + 1 < bands.length; i++) {
      for (let s = 0; s < bands[i].spans.length; s++) {
        expect(bands[i].spans[s].y1).toBeCloseTo(bands[i + 1].spans[s].y0, 12);
      }
    }
  });

  it("gives zero-thickness spans for missing years", () => {
    const bands = streamBands(series);
    const copyright = bands[1].spans.find((s) => s.year === 2024)!;
    expect(copyright.y0).toBe(copyright.y1);
  });
});

describe("bandPolygon", () => {
  it("emits one x,y pair per span endpoint", () => {
    const bands = streamBands(series);
    const range = bandsValueRange(bands);
    const points = bandPolygon(bands[0], [2019, 2020, 2024], range, 640, 240).split(" ");
    expect(points).toHaveLength(bands[0].spans.length * 2);
    for (const pair of points) {
      const [x, y] = pair.split(",").map(Number);
      expect(Number.isFinite(x)).toBe(true);
      expect(Number.isFinite(y)).toBe(true);
      expect(x).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThanOrEqual(640);
      expect(y).toBeGreaterThanOrEqual(0);
      expect(y).toBeLessThanOrEqual(240);
    }
  });
});
