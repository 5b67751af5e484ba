"""Per-document topic extraction over cluster labels.

Clusters become topics through class-based TF-IDF: each cluster is treated
as one pseudo-document and terms are weighted by tf(t, c) * ln(1 + A / f(t))
with A the mean token count per class and f the term's total count across
classes. Topic term lists can optionally be diversified with maximal
marginal relevance. A deterministic retry schedule guarantees a minimum
number of topics per document when the data allows it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator

from .embed import HashedEmbedder
from .errors import EmptyVocabularyError, NoTopicsFound, ParamError, TooFewTopics
from .preprocess import CleanSentence, Vocabulary, build_vocabulary
from .clustering import ClusterParams, cluster_coordinates
from .reduction import ReduceParams, build_fuzzy_graph, optimize_layout

TOPICS_HEADER = ["doc_id", "topic_id", "size", "rank", "term", "weight"]
REPRESENTATIVES_HEADER = ["doc_id", "topic_id", "sentence_index", "similarity"]


@dataclass(frozen=True)
class PipelineParams:
    reduce: ReduceParams = field(default_factory=ReduceParams)
    cluster: ClusterParams = field(default_factory=ClusterParams)
    top_n: int = 10
    min_topics: int = 3
    mmr_lambda: float | None = None
    n_representatives: int = 3
    min_df: int = 1

    def __post_init__(self):
        if self.min_topics < 1:
            raise ParamError("min_topics must be >= 1")
        if self.top_n < 1:
            raise ParamError("top_n must be >= 1")
        if self.mmr_lambda is not None and not 0.0 <= self.mmr_lambda <= 1.0:
            raise ParamError("mmr_lambda must be in [0, 1]")


@dataclass(frozen=True)
class TopicCluster:
    doc_id: str
    topic_id: int
    size: int
    top_terms: tuple[tuple[str, float], ...]
    representatives: tuple[tuple[int, float], ...]  # (sentence_index, similarity)

    @property
    def sentence_indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.representatives)


def class_tf_idf(class_tokens: list[list[str]], vocab: Vocabulary) -> np.ndarray:
    """Weight matrix (n_classes x n_terms) of the class-based TF-IDF.

    Tokens outside the vocabulary are ignored; a term absent from a class
    gets weight zero.
    """
    if len(vocab) == 0:
        raise EmptyVocabularyError("vocabulary is empty")
    n_classes = len(class_tokens)
    if n_classes == 0:
        raise ParamError("need at least one class")
    tf = np.zeros((n_classes, len(vocab)))
    for c, tokens in enumerate(class_tokens):
        for token in tokens:
            idx = vocab.index.get(token)
            if idx is not None:
                tf[c, idx] += 1.0
    f = tf.sum(axis=0)
    mean_class_tokens = tf.sum() / n_classes
    with np.errstate(divide="ignore", invalid="ignore"):
        idf = np.log1p(np.where(f > 0.0, mean_class_tokens / np.where(f > 0.0, f, 1.0), 0.0))
    return tf * idf[None, :]


def top_terms(weights: np.ndarray, vocab: Vocabulary, top_n: int) -> list[tuple[str, float]]:
    """Highest-weight terms of one class, ties broken lexicographically,
    zero weights excluded."""
    if top_n < 1:
        raise ParamError("top_n must be >= 1")
    pairs = [(vocab.terms[t], float(w)) for t, w in enumerate(weights) if w > 0.0]
    pairs.sort(key=lambda p: (-p[1], p[0]))
    return pairs[:top_n]


def _cosine_sim(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(u @ v) / (nu * nv)


def mmr_rerank(
    candidates: list[tuple[str, float]],
    term_vectors: dict[str, np.ndarray],
    lam: float,
    top_n: int,
) -> list[tuple[str, float]]:
    """Greedy maximal-marginal-relevance selection.

    Score = lam * relevance - (1 - lam) * max similarity to already selected
    terms; candidates are scanned in (relevance desc, term asc) order so ties
    reproduce the plain relevance ranking.
    """
    if not 0.0 <= lam <= 1.0:
        raise ParamError("lambda must be in [0, 1]")
    remaining = sorted(candidates, key=lambda p: (-p[1], p[0]))
    selected: list[tuple[str, float]] = []
    while remaining and len(selected) < top_n:
        best_idx = 0
        best_score = -np.inf
        for idx, (term, rel) in enumerate(remaining):
            penalty = 0.0
            if selected:
                penalty = max(
                    _cosine_sim(term_vectors[term], term_vectors[prev]) for prev, _ in selected
                )
            score = lam * rel - (1.0 - lam) * penalty
            if score > best_score:
                best_score = score
                best_idx = idx
        selected.append(remaining.pop(best_idx))
    return selected


def representatives(
    member_embeddings: np.ndarray, sentence_indices: list[int], r: int
) -> list[tuple[int, float]]:
    """The r members most cosine-similar to the cluster centroid; ties broken
    by sentence index."""
    member_embeddings = np.asarray(member_embeddings, dtype=np.float64)
    if member_embeddings.shape[0] == 0:
        raise ParamError("cluster is empty")
    centroid = member_embeddings.mean(axis=0)
    sims = [
        (_cosine_sim(member_embeddings[i], centroid), sentence_indices[i])
        for i in range(member_embeddings.shape[0])
    ]
    sims.sort(key=lambda p: (-p[0], p[1]))
    return [(idx, sim) for sim, idx in sims[:r]]


def _default_term_vectors(
    doc_tokens: list[tuple[str, ...]], terms: list[str], seed: int
) -> dict[str, np.ndarray]:
    """Embed single-term pseudo-sentences with the hashed backend."""
    embedder = HashedEmbedder(seed=seed).fit(doc_tokens)
    vecs = embedder.transform([[t] for t in terms])
    return {t: vecs[i] for i, t in enumerate(terms)}


def model_document(
    sentences: list[CleanSentence],
    embeddings: np.ndarray,
    params: PipelineParams,
    stopwords: frozenset[str] | None = None,
    stopword_list_id: str | None = None,
) -> list[TopicCluster]:
    """Reduce -> cluster -> class TF-IDF -> representatives for one document.

    ``embeddings`` rows align with ``sentences``. Outlier sentences are
    excluded from every topic; topic ids follow descending cluster size with
    ties broken by the smallest member sentence index.
    """
    n = len(sentences)
    if n == 0:
        raise ParamError("document has no sentences")
    doc_ids = {s.doc_id for s in sentences}
    if len(doc_ids) != 1:
        raise ParamError("model_document expects sentences of exactly one document")
    doc_id = doc_ids.pop()
    if n < params.cluster.min_cluster_size:
        raise ParamError(
            f"document {doc_id!r} has {n} sentences, fewer than "
            f"min_cluster_size={params.cluster.min_cluster_size}"
        )
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if embeddings.shape[0] != n:
        raise ParamError("embedding row count does not match sentence count")

    # Small documents cannot honor the full neighborhood size.
    k_eff = min(params.reduce.n_neighbors, n - 1)
    if k_eff < 2:
        raise ParamError("document too small for neighborhood construction")
    reduce_params = replace(params.reduce, n_neighbors=k_eff).resolve_kernel()

    graph = build_fuzzy_graph(embeddings, reduce_params.n_neighbors, reduce_params.metric)
    coords = optimize_layout(graph, reduce_params)
    result = cluster_coordinates(coords, params.cluster)

    members: dict[int, list[int]] = {}
    for pos, label in enumerate(result.labels):
        if label >= 0:
            members.setdefault(int(label), []).append(pos)
    if not members:
        raise NoTopicsFound(f"document {doc_id!r}: every sentence is an outlier")

    order = sorted(
        members,
        key=lambda lbl: (-len(members[lbl]), min(sentences[p].index for p in members[lbl])),
    )

    vocab = build_vocabulary(sentences, params.min_df, stopwords, stopword_list_id)
    class_tokens = [
        [t for p in members[lbl] for t in sentences[p].tokens if t in vocab] for lbl in order
    ]
    weights = class_tf_idf(class_tokens, vocab)

    term_vectors: dict[str, np.ndarray] | None = None
    if params.mmr_lambda is not None:
        term_vectors = _default_term_vectors(
            [s.tokens for s in sentences], list(vocab.terms), params.reduce.seed
        )

    topics: list[TopicCluster] = []
    for topic_id, lbl in enumerate(order):
        positions = members[lbl]
        if params.mmr_lambda is not None:
            candidates = top_terms(weights[topic_id], vocab, params.top_n * 3)
            ranked = mmr_rerank(candidates, term_vectors, params.mmr_lambda, params.top_n)
        else:
            ranked = top_terms(weights[topic_id], vocab, params.top_n)
        reps = representatives(
            embeddings[positions],
            [sentences[p].index for p in positions],
            params.n_representatives,
        )
        topics.append(
            TopicCluster(
                doc_id=doc_id,
                topic_id=topic_id,
                size=len(positions),
                top_terms=tuple(ranked),
                representatives=tuple(reps),
            )
        )
    return topics


def retry_schedule(params: PipelineParams) -> list[tuple[int, int]]:
    """(min_cluster_size, n_neighbors) attempts: the size ladder steps down
    by 2 to a floor of 2, then the neighborhood is halved once."""
    start = params.cluster.min_cluster_size
    ladder = list(range(start, 1, -2))
    if not ladder or ladder[-1] != 2:
        ladder.append(2)
    k = params.reduce.n_neighbors
    attempts = [(mcs, k) for mcs in ladder]
    attempts.append((ladder[-1], max(2, k // 2)))
    seen: set[tuple[int, int]] = set()
    unique: list[tuple[int, int]] = []
    for att in attempts:
        if att not in seen:
            seen.add(att)
            unique.append(att)
    return unique


def ensure_min_topics(
    sentences: list[CleanSentence],
    embeddings: np.ndarray,
    params: PipelineParams,
    stopwords: frozenset[str] | None = None,
    stopword_list_id: str | None = None,
) -> tuple[PipelineParams, list[TopicCluster]]:
    """Run model_document through the retry schedule until at least
    ``params.min_topics`` topics come back; raise TooFewTopics otherwise."""
    best_count = 0
    tried: list[tuple[int, int]] = []
    for mcs, k in retry_schedule(params):
        attempt = replace(
            params,
            cluster=replace(params.cluster, min_cluster_size=mcs),
            reduce=replace(params.reduce, n_neighbors=k),
        )
        tried.append((mcs, k))
        try:
            topics = model_document(sentences, embeddings, attempt, stopwords, stopword_list_id)
        except (ParamError, NoTopicsFound, EmptyVocabularyError):
            continue
        if len(topics) >= params.min_topics:
            return attempt, topics
        best_count = max(best_count, len(topics))
    raise TooFewTopics(best_count, tried)


class DocumentTopicModel(BaseEstimator):
    """sklearn-style wrapper: fit one document, expose its topics."""

    def __init__(
        self,
        min_cluster_size: int = 10,
        min_samples: int | None = None,
        n_neighbors: int = 15,
        n_components: int = 5,
        n_epochs: int = 200,
        seed: int = 42,
        top_n: int = 10,
        min_topics: int = 3,
        mmr_lambda: float | None = None,
        n_representatives: int = 3,
    ):
        self.min_cluster_size = min_cluster_size
        self.min_samples = min_samples
        self.n_neighbors = n_neighbors
        self.n_components = n_components
        self.n_epochs = n_epochs
        self.seed = seed
        self.top_n = top_n
        self.min_topics = min_topics
        self.mmr_lambda = mmr_lambda
        self.n_representatives = n_representatives

    def _params(self) -> PipelineParams:
        return PipelineParams(
            reduce=ReduceParams(
                n_neighbors=self.n_neighbors,
                n_components=self.n_components,
                n_epochs=self.n_epochs,
                seed=self.seed,
            ),
            cluster=ClusterParams(self.min_cluster_size, self.min_samples),
            top_n=self.top_n,
            min_topics=self.min_topics,
            mmr_lambda=self.mmr_lambda,
            n_representatives=self.n_representatives,
        )

    def fit(self, sentences, embeddings=None):
        self.params_used_, self.topics_ = ensure_min_topics(
            sentences, embeddings, self._params()
        )
        return self


def write_topics_csv(topics: list[TopicCluster], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TOPICS_HEADER)
        for t in topics:
            for rank, (term, weight) in enumerate(t.top_terms, start=1):
                writer.writerow([t.doc_id, t.topic_id, t.size, rank, term, f"{weight:.10g}"])


def write_representatives_csv(topics: list[TopicCluster], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPRESENTATIVES_HEADER)
        for t in topics:
            for idx, sim in t.representatives:
                writer.writerow([t.doc_id, t.topic_id, idx, f"{sim:.10g}"])


def read_topics_csv(path) -> dict[str, list[TopicCluster]]:
    """Rebuild TopicCluster records (without representatives) per document."""
    grouped: dict[tuple[str, int], dict] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        for row in reader:
            if not row:
                continue
            doc_id, topic_id, size, _, term, weight = row
            key = (doc_id, int(topic_id))
            entry = grouped.setdefault(key, {"size": int(size), "terms": []})
            entry["terms"].append((term, float(weight)))
    out: dict[str, list[TopicCluster]] = {}
    for (doc_id, topic_id), entry in sorted(grouped.items()):
        out.setdefault(doc_id, []).append(
            TopicCluster(doc_id, topic_id, entry["size"], tuple(entry["terms"]), ())
        )
    return out
