"""Topic clustering and theme-evolution analytics for policy corpora."""

from .corpus import Document, Sentence, load_manifest, split_sentences, ingest_document
from .preprocess import CleanSentence, Vocabulary, normalize_sentence, build_vocabulary
from .embed import (
    EmbeddingMatrix,
    HashedEmbedder,
    cosine_distance,
    embed_hashed,
    load_external_embeddings,
    save_embeddings,
)
from .reduction import FuzzyGraph, NeighborEmbedding, ReduceParams
from .clustering import ClusterLabels, ClusterParams, DensityClusterer
from .topics import (
    DocumentTopicModel,
    PipelineParams,
    TopicCluster,
    class_tf_idf,
    ensure_min_topics,
    model_document,
)
from .themes import (
    AnnotationStore,
    ThemeAssignment,
    ThemeCatalog,
    catalog,
    incoherence_rate,
    merge_annotators,
)
from .evolve import EvolutionSeries, select_series, stream_layout, theme_by_year

__version__ = "0.1.0"

__all__ = [
    "AnnotationStore",
    "CleanSentence",
    "ClusterLabels",
    "ClusterParams",
    "DensityClusterer",
    "Document",
    "DocumentTopicModel",
    "EmbeddingMatrix",
    "EvolutionSeries",
    "FuzzyGraph",
    "HashedEmbedder",
    "NeighborEmbedding",
    "PipelineParams",
    "ReduceParams",
    "Sentence",
    "ThemeAssignment",
    "ThemeCatalog",
    "TopicCluster",
    "Vocabulary",
    "build_vocabulary",
    "catalog",
    "class_tf_idf",
    "cosine_distance",
    "embed_hashed",
    "ensure_min_topics",
    "incoherence_rate",
    "ingest_document",
    "load_external_embeddings",
    "load_manifest",
    "merge_annotators",
    "model_document",
    "normalize_sentence",
    "save_embeddings",
    "select_series",
    "split_sentences",
    "stream_layout",
    "theme_by_year",
]
