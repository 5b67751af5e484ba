"""Build a small modelled project for UI integration tests.

Usage: python3 make_fixture.py TARGET_DIR
"""

import subprocess
import sys
from pathlib import Path

import numpy as np

CONSONANTS = "bdfgklmnprstvz"
VOWELS = "aeiou"


def pseudo_word(rng):
    return "".join(
        CONSONANTS[rng.integers(len(CONSONANTS))] + VOWELS[rng.integers(len(VOWELS))]
        for _ in range(rng.integers(2, 4))
    )


def doc_text(rng, n_clusters, sentences_per_cluster=30):
    lines = []
    for _ in range(n_clusters):
        words = [pseudo_word(rng) for _ in range(8)]
        for _ in range(sentences_per_cluster):
            picks = [words[rng.integers(len(words))] for _ in range(rng.integers(6, 11))]
            lines.append(" ".join(picks).capitalize() + ".")
    return " ".join(lines)


def main() -> None:
    root = Path(sys.argv[1])
    root.mkdir(parents=True, exist_ok=True)
    (root / "texts").mkdir(exist_ok=True)
    rng = np.random.default_rng(2024)
    rows = [
        ("01", "Early guideline", "EU HLEG", "guideline", 2019, "pre_ai_act", 3),
        ("05", "The Act", "EU Council and Parliament", "legislation", 2024, "post_ai_act", 4),
    ]
    lines = ["doc_id,title,issuer,doc_type,year,era"]
    for doc_id, title, issuer, doc_type, year, era, n_clusters in rows:
        lines.append(f"{doc_id},{title},{issuer},{doc_type},{year},{era}")
        (root / "texts" / f"{doc_id}.txt").write_text(doc_text(rng, n_clusters))
    (root / "manifest.csv").write_text("\n".join(lines) + "\n")
    for cmd in (["ingest"], ["embed", "--seed", "42"], ["model", "--seed", "42"]):
        subprocess.run(["policytopics", "-C", str(root), *cmd], check=True)
    print(f"fixture project ready at {root}")


if __name__ == "__main__":
    main()
