// Client-side mirrors of the server's assignment rules. The server is the
// source of truth; these only block requests that would certainly 422.

export const MAX_THEMES = 3;

export function normalizeTheme(name: string): string {
  return name.trim().toLowerCase();
}

export type ThemeListCheck =
  | { ok: true; themes: string[] }
  | { ok: false; reason: string };

/** Trim, drop empties, collapse case-insensitive duplicates, cap at three. */
export function checkThemes(raw: string[]): ThemeListCheck {
  const seen = new Set<string>();
  const themes: string[] = [];
  for (const entry of raw) {
    const display = entry.trim();
    if (!display) continue;
    const key = normalizeTheme(display);
    if (seen.has(key)) continue;
    seen.add(key);
    themes.push(display);
  }
  if (themes.length > MAX_THEMES) {
    return { ok: false, reason: `at most ${MAX_THEMES} themes per cluster` };
  }
  return { ok: true, themes };
}

/** Whether one more chip may be added to the current list. */
export function canAddTheme(current: string[], candidate: string): ThemeListCheck {
  const added = checkThemes([...current, candidate]);
  if (!added.ok) return added;
  if (added.themes.length === current.length) {
    return { ok: false, reason: "theme already assigned" };
  }
  return added;
}

/** Incoherent clusters carry no themes. */
export function checkConsistency(coherent: boolean, themes: string[]): ThemeListCheck {
  if (!coherent && themes.length > 0) {
    return { ok: false, reason: "an incoherent cluster cannot carry themes" };
  }
  return { ok: true, themes };
}

/** Case-insensitive prefix suggestions from the theme catalog. */
export function autocomplete(catalog: string[], prefix: string, limit = 8): string[] {
  const needle = normalizeTheme(prefix);
  if (!needle) return [];
  const starts: string[] = [];
  const contains: string[] = [];
  for (const theme of catalog) {
    const key = normalizeTheme(theme);
    if (key.startsWith(needle)) starts.push(theme);
    else if (key.includes(needle)) contains.push(theme);
  }
  return [...starts, ...contains].slice(0, limit);
}
