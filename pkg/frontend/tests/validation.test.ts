import { describe, expect, it } from "vitest";

import {
  MAX_THEMES,
  autocomplete,
  canAddTheme,
  checkConsistency,
  checkThemes,
} from "../src/validation.js";

describe("checkThemes", () => {
  it("accepts up to three themes", () => {
    const result = checkThemes(["Risk", "Oversight", "Privacy"]);
    expect(result).toEqual({ ok: true, themes: ["Risk", "Oversight", "Privacy"] });
  });

  it("rejects a fourth theme", () => {
    const result = checkThemes(["a", "b", "c", "d"]);
    expect(result.ok).toBe(false);
  });

  it("collapses case-insensitive duplicates and trims", () => {
    const result = checkThemes([" Risk ", "risk", "RISK", "Bias"]);
    expect(result).toEqual({ ok: true, themes: ["Risk", "Bias"] });
  });

  it("drops empty entries", () => {
    expect(checkThemes(["", "  ", "Risk"])).toEqual({ ok: true, themes: ["Risk"] });
  });
});

describe("canAddTheme", () => {
  it("blocks the fourth chip client-side", () => {
    const result = canAddTheme(["a", "b", "c"], "d");
    expect(result.ok).toBe(false);
    if (!result.ok) expect(result.reason).toContain(`${MAX_THEMES}`);
  });

  it("blocks duplicates", () => {
    expect(canAddTheme(["Risk"], "risk").ok).toBe(false);
  });

  it("allows a third chip", () => {
    expect(canAddTheme(["a", "b"], "c")).toEqual({ ok: true, themes: ["a", "b", "c"] });
  });
});

describe("checkConsistency", () => {
  it("rejects themes on incoherent clusters", () => {
    expect(checkConsistency(false, ["Risk"]).ok).toBe(false);
  });

  it("accepts incoherent with no themes", () => {
    expect(checkConsistency(false, []).ok).toBe(true);
  });

  it("accepts coherent with themes", () => {
    expect(checkConsistency(true, ["Risk"]).ok).toBe(true);
  });
});

describe("autocomplete", () => {
  const catalog = ["Risk", "Risk assessment", "Rule of law", "Oversight", "Privacy"];

  it("ranks prefix matches before substring matches", () => {
    expect(autocomplete(catalog, "ri")).toEqual(["Risk", "Risk assessment", "Privacy"]);
  });

  it("falls back to substring matches after prefixes", () => {
    expect(autocomplete(catalog, "law")).toEqual(["Rule of law"]);
  });

  it("is empty for blank input", () => {
    expect(autocomplete(catalog, "  ")).toEqual([]);
  });

  it("caps the suggestion count", () => {
    const many = Array.from({ length: 20 }, (_, i) => `Theme ${i}`);
    expect(autocomplete(many, "theme", 8)).toHaveLength(8);
  });
});
