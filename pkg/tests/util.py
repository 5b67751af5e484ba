"""Shared test helpers: synthetic corpora and independent oracles.

Oracles here deliberately avoid the package's own code paths: Kruskal vs
Prim, exhaustive scans vs argsort-based k-NN, dict arithmetic vs the
vectorized class TF-IDF.
"""

from __future__ import annotations

import math

import numpy as np

from policytopics.preprocess import CleanSentence

CONSONANTS = "bdfgklmnprstvz"
VOWELS = "aeiou"


def pseudo_word(rng) -> str:
    pairs = rng.integers(2, 4)
    return "".join(
        CONSONANTS[rng.integers(len(CONSONANTS))] + VOWELS[rng.integers(len(VOWELS))]
        for _ in range(pairs)
    )


def planted_vocabularies(rng, n_clusters: int, words_per_cluster: int, forbidden=frozenset()):
    """Disjoint pseudo-word vocabularies, avoiding stop words."""
    vocabs: list[list[str]] = []
    seen: set[str] = set(forbidden)
    for _ in range(n_clusters):
        words: list[str] = []
        while len(words) < words_per_cluster:
            w = pseudo_word(rng)
            if w not in seen:
                seen.add(w)
                words.append(w)
        vocabs.append(words)
    return vocabs


def synthetic_clean_doc(
    doc_id: str,
    n_clusters: int,
    sentences_per_cluster: int,
    seed: int,
    words_per_cluster: int = 8,
    forbidden=frozenset(),
):
    """CleanSentence corpus with planted disjoint-vocabulary clusters."""
    rng = np.random.default_rng(seed)
    vocabs = planted_vocabularies(rng, n_clusters, words_per_cluster, forbidden)
    sentences: list[CleanSentence] = []
    index = 0
    for words in vocabs:
        for _ in range(sentences_per_cluster):
            length = rng.integers(6, 11)
            tokens = tuple(words[rng.integers(len(words))] for _ in range(length))
            sentences.append(CleanSentence(doc_id, index, tokens))
            index += 1
    truth = np.repeat(np.arange(n_clusters), sentences_per_cluster)
    return sentences, truth, vocabs


def synthetic_raw_text(
    n_clusters: int, sentences_per_cluster: int, seed: int, forbidden=frozenset()
) -> str:
    """Raw document text whose ingest+preprocess output plants clusters."""
    rng = np.random.default_rng(seed)
    vocabs = planted_vocabularies(rng, n_clusters, 8, forbidden)
    lines = []
    for words in vocabs:
        for _ in range(sentences_per_cluster):
            length = rng.integers(6, 11)
            tokens = [words[rng.integers(len(words))] for _ in range(length)]
            sentence = " ".join(tokens).capitalize() + "."
            lines.append(sentence)
    return " ".join(lines)


def gaussian_blobs(rng, centers, points_per_blob: int, spread: float = 1.0):
    centers = np.asarray(centers, dtype=float)
    X = np.vstack(
        [c + rng.normal(0.0, spread, size=(points_per_blob, centers.shape[1])) for c in centers]
    )
    truth = np.repeat(np.arange(len(centers)), points_per_blob)
    return X, truth


def kruskal_total(weights: np.ndarray) -> float:
    """Independent MST total weight via Kruskal with plain sorting."""
    n = weights.shape[0]
    edges = [(float(weights[i, j]), i, j) for i in range(n) for j in range(i + 1, n)]
    edges.sort()
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for w, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            chosen.append(w)
            if len(chosen) == n - 1:
                break
    return math.fsum(chosen)  # exact, order-independent total


def brute_knn(X: np.ndarray, k: int, metric: str):
    """Exhaustive per-point scan with explicit tie-breaks."""
    n = X.shape[0]
    indices = np.zeros((n, k), dtype=int)
    dists = np.zeros((n, k))
    for i in range(n):
        cands = []
        for j in range(n):
            if j == i:
                continue
            if metric == "euclidean":
                d = float(np.linalg.norm(X[i] - X[j]))
            else:
                ni, nj = np.linalg.norm(X[i]), np.linalg.norm(X[j])
                if ni == 0.0 or nj == 0.0:
                    d = 1.0
                else:
                    d = float(min(2.0, max(0.0, 1.0 - float(X[i] @ X[j]) / (ni * nj))))
            cands.append((d, j))
        cands.sort()
        for pos in range(k):
            dists[i, pos], indices[i, pos] = cands[pos]
    return indices, dists


def dense_class_tf_idf(class_tokens, terms):
    """Independent dict-based recomputation of W(t, c) = tf * ln(1 + A / f)."""
    n_classes = len(class_tokens)
    tf = [dict() for _ in range(n_classes)]
    allowed = set(terms)
    for c, tokens in enumerate(class_tokens):
        for t in tokens:
            if t in allowed:
                tf[c][t] = tf[c].get(t, 0) + 1
    f = {}
    for counts in tf:
        for t, v in counts.items():
            f[t] = f.get(t, 0) + v
    mean_tokens = sum(sum(c.values()) for c in tf) / n_classes
    W = np.zeros((n_classes, len(terms)))
    for c in range(n_classes):
        for t_idx, t in enumerate(terms):
            count = tf[c].get(t, 0)
            if count:
                W[c, t_idx] = count * math.log(1.0 + mean_tokens / f[t])
    return W


MANIFEST_ROWS = [
    ("01", "Early recommendation", "EU HLEG", "recommendation", 2019, "pre_ai_act"),
    ("02", "Early guideline", "EU HLEG", "guideline", 2019, "pre_ai_act"),
    ("03", "Assessment list", "EU HLEG", "guideline", 2020, "pre_ai_act"),
    ("04", "Sector notes", "EU HLEG", "recommendation", 2020, "pre_ai_act"),
    ("05", "The Act", "EU Council and Parliament", "legislation", 2024, "post_ai_act"),
    ("06", "Prohibited practices", "European Commission", "guideline", 2025, "post_ai_act"),
    ("07", "Model obligations", "European Commission", "guideline", 2025, "post_ai_act"),
    ("08", "Practice code", "European Commission", "code_of_practice", 2025, "post_ai_act"),
]


def build_project(root, cluster_plan, sentences_per_cluster=35, seed=500, forbidden=frozenset()):
    """Write manifest.csv and texts/<doc_id>.txt with planted clusters.

    cluster_plan maps position (0-based) to planted cluster count; only the
    first len(cluster_plan) manifest rows are used.
    """
    from pathlib import Path

    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    (root / "texts").mkdir(exist_ok=True)
    lines = ["doc_id,title,issuer,doc_type,year,era"]
    for pos, n_clusters in enumerate(cluster_plan):
        doc_id, title, issuer, doc_type, year, era = MANIFEST_ROWS[pos]
        lines.append(f"{doc_id},{title},{issuer},{doc_type},{year},{era}")
        text = synthetic_raw_text(
            n_clusters, sentences_per_cluster, seed=seed + pos, forbidden=forbidden
        )
        (root / "texts" / f"{doc_id}.txt").write_text(text, encoding="utf-8")
    (root / "manifest.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return root


def central_difference(fn, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    grad = np.zeros_like(x, dtype=float)
    for i in range(x.size):
        up = x.copy()
        down = x.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (fn(up) - fn(down)) / (2.0 * h)
    return grad
