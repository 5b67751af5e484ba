"""Token-level preprocessing and vocabulary construction.

Four rules run before embedding, in order: lowercase, drop tokens without a
letter, drop digit-only tokens, drop tokens shorter than two characters.
Stop words are deliberately NOT removed at this stage; they are filtered
later, when the vocabulary for topic representation is built.
"""

from __future__ import annotations

import hashlib
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

from .errors import EmptyVocabularyError

# Any character that is neither letter nor digit separates tokens.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class CleanSentence:
    doc_id: str
    index: int
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    doc_frequencies: tuple[int, ...]
    stopword_list_id: str
    index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})

    def __contains__(self, term: str) -> bool:
        return term in self.index

    def __len__(self) -> int:
        return len(self.terms)


def load_stopwords(path=None) -> tuple[frozenset[str], str]:
    """Load a stop-word list and derive its content-hash identifier."""
    if path is None:
        data = resources.files("policytopics").joinpath("data/stopwords.txt").read_bytes()
    else:
        with open(path, "rb") as fh:
            data = fh.read()
    words = frozenset(
        line.strip().lower() for line in data.decode("utf-8").splitlines() if line.strip()
    )
    list_id = "sha256:" + hashlib.sha256(data).hexdigest()[:12]
    return words, list_id


def tokenize(raw: str) -> list[str]:
    """Raw tokens: maximal runs of letters and digits."""
    return _TOKEN_RE.findall(raw)


def normalize_sentence(raw: str) -> list[str]:
    """Apply the four preprocessing rules to one raw sentence."""
    out = []
    for token in tokenize(raw):
        token = token.lower()
        if not any(c.isalpha() for c in token):
            continue
        if token.isdigit():  # unreachable after the letter check; kept explicit
            continue
        if len(token) < 2:
            continue
        out.append(token)
    return out


def clean_corpus(sentences) -> list[CleanSentence]:
    """Normalize a list of corpus ``Sentence`` records."""
    return [CleanSentence(s.doc_id, s.index, tuple(normalize_sentence(s.text))) for s in sentences]


def build_vocabulary(
    corpus: list[CleanSentence],
    min_df: int = 1,
    stopwords: frozenset[str] | None = None,
    stopword_list_id: str | None = None,
) -> Vocabulary:
    """Terms with sentence-level document frequency >= ``min_df``, stop words
    removed, sorted lexicographically."""
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    if stopwords is None:
        stopwords, stopword_list_id = load_stopwords()
    elif stopword_list_id is None:
        stopword_list_id = "custom"
    df: Counter[str] = Counter()
    for sent in corpus:
        df.update(set(sent.tokens))
    terms = sorted(t for t, c in df.items() if c >= min_df and t not in stopwords)
    if not terms:
        raise EmptyVocabularyError("no term survived min_df and stop-word filtering")
    return Vocabulary(
        terms=tuple(terms),
        doc_frequencies=tuple(df[t] for t in terms),
        stopword_list_id=stopword_list_id,
    )
