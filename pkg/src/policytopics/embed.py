"""Sentence vectors: deterministic hashed TF-IDF backend plus EMB1 import.

The hashed backend is a stand-in for transformer embeddings: signed feature
hashing into a fixed number of buckets, smoothed TF-IDF weighting, then a
seeded ±1 random projection down to ``dim``. Vectors computed elsewhere
(e.g. by a transformer) are imported through the EMB1 binary format.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import EmptyCorpusError, FormatError, RowCountMismatch, ZeroVectorError

EMB1_MAGIC = b"EMB1"


@dataclass
class EmbeddingMatrix:
    values: np.ndarray  # n x dim, rows unit L2 norm (or zero, flagged)
    backend_tag: str  # "hashed" | "external"
    seed: int | None = None
    zero_rows: tuple[int, ...] = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def _hash_token(token: str) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _bucket_counts(tokens, buckets: int) -> dict[int, float]:
    """Signed hashed counts; entries cancelled to zero are dropped."""
    counts: dict[int, float] = {}
    for token in tokens:
        h = _hash_token(token)
        bucket = h % buckets
        sign = 1.0 if (h >> 60) & 1 else -1.0
        counts[bucket] = counts.get(bucket, 0.0) + sign
    return {b: c for b, c in counts.items() if c != 0.0}


class HashedEmbedder(TransformerMixin, BaseEstimator):
    """Hashed TF-IDF + seeded random-projection sentence embedder.

    ``fit`` learns the per-bucket document frequencies of the corpus;
    ``transform`` maps token lists to unit-norm rows. Output is bit-identical
    for identical (corpus, dim, buckets, seed).
    """

    def __init__(self, dim: int = 256, buckets: int = 32768, seed: int = 0):
        self.dim = dim
        self.buckets = buckets
        self.seed = seed

    def fit(self, token_lists, y=None):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.buckets < self.dim:
            raise ValueError("buckets must be >= dim")
        token_lists = list(token_lists)
        if not token_lists:
            raise EmptyCorpusError("cannot fit embedder on an empty corpus")
        n = len(token_lists)
        df: dict[int, int] = {}
        for tokens in token_lists:
            for bucket in _bucket_counts(tokens, self.buckets):
                df[bucket] = df.get(bucket, 0) + 1
        idf = np.ones(self.buckets)
        for bucket, count in df.items():
            idf[bucket] = math.log((1.0 + n) / (1.0 + count)) + 1.0
        self.idf_ = idf
        rng = np.random.default_rng(self.seed)
        self.signs_ = (rng.integers(0, 2, size=(self.buckets, self.dim), dtype=np.int8) * 2 - 1)
        return self

    def transform(self, token_lists) -> np.ndarray:
        rows = np.zeros((len(list(token_lists)), self.dim))
        scale = 1.0 / math.sqrt(self.dim)
        for i, tokens in enumerate(token_lists):
            counts = _bucket_counts(tokens, self.buckets)
            if not counts:
                continue
            idx = np.fromiter(counts.keys(), dtype=np.int64)
            vals = np.fromiter(counts.values(), dtype=np.float64) * self.idf_[idx]
            vals /= np.linalg.norm(vals)
            row = (vals @ self.signs_[idx].astype(np.float64)) * scale
            norm = np.linalg.norm(row)
            if norm > 0.0:
                rows[i] = row / norm
        return rows


def embed_hashed(corpus, dim: int = 256, buckets: int = 32768, seed: int = 0) -> EmbeddingMatrix:
    """Embed a corpus of ``CleanSentence`` records with the hashed backend."""
    token_lists = [s.tokens for s in corpus]
    if not token_lists:
        raise EmptyCorpusError("corpus is empty")
    embedder = HashedEmbedder(dim=dim, buckets=buckets, seed=seed).fit(token_lists)
    values = embedder.transform(token_lists)
    zero_rows = tuple(int(i) for i in np.flatnonzero(np.linalg.norm(values, axis=1) == 0.0))
    return EmbeddingMatrix(values=values, backend_tag="hashed", seed=seed, zero_rows=zero_rows)


def save_embeddings(matrix: EmbeddingMatrix, path) -> None:
    """Write the EMB1 binary format (magic, u32 n, u32 dim, f32 row-major)."""
    with open(path, "wb") as fh:
        fh.write(EMB1_MAGIC)
        fh.write(struct.pack("<II", matrix.n, matrix.dim))
        fh.write(np.ascontiguousarray(matrix.values, dtype="<f4").tobytes())


def load_external_embeddings(path, expected_n: int) -> EmbeddingMatrix:
    """Read an EMB1 file and re-normalize rows to unit L2 norm."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != EMB1_MAGIC:
        raise FormatError(f"{path}: not an EMB1 file")
    n, dim = struct.unpack("<II", data[4:12])
    expected_bytes = 12 + 4 * n * dim
    if len(data) != expected_bytes:
        raise FormatError(f"{path}: expected {expected_bytes} bytes, found {len(data)}")
    if n != expected_n:
        raise RowCountMismatch(f"{path}: file has {n} rows, expected {expected_n}")
    values = np.frombuffer(data, dtype="<f4", offset=12).astype(np.float64).reshape(n, dim)
    norms = np.linalg.norm(values, axis=1)
    nonzero = norms > 0.0
    values[nonzero] /= norms[nonzero, None]
    zero_rows = tuple(int(i) for i in np.flatnonzero(~nonzero))
    return EmbeddingMatrix(values=values, backend_tag="external", seed=None, zero_rows=zero_rows)


def cosine_distance(u, v) -> float:
    """1 - cos(u, v), in [0, 2]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError("vectors must have equal length")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine distance undefined for zero vectors")
    return float(min(2.0, max(0.0, 1.0 - float(u @ v) / (nu * nv))))
