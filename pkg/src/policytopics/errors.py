"""Exception types shared across the toolkit.

Every domain failure raises a subclass of :class:`PolicyTopicsError` so the
CLI and HTTP layers can map them to exit code 1 / 4xx responses uniformly.
"""


class PolicyTopicsError(Exception):
    """Base class for all domain errors."""


class ManifestError(PolicyTopicsError):
    """Manifest file is malformed or violates document invariants."""


class EmptyDocumentError(PolicyTopicsError):
    """Document text contains no sentences after splitting."""


class EmptyVocabularyError(PolicyTopicsError):
    """Every candidate term was filtered out of the vocabulary."""


class EmptyCorpusError(PolicyTopicsError):
    """An operation that needs at least one sentence received none."""


class RowCountMismatch(PolicyTopicsError):
    """Imported embedding matrix does not match the expected sentence count."""


class FormatError(PolicyTopicsError):
    """Binary or CSV payload does not conform to its declared format."""


class ZeroVectorError(PolicyTopicsError):
    """Cosine distance is undefined for a zero vector."""


class ParamError(PolicyTopicsError):
    """Parameter value is outside its legal range for the given data."""


class NoTopicsFound(PolicyTopicsError):
    """Clustering labelled every sentence as outlier."""


class TooFewTopics(PolicyTopicsError):
    """The retry schedule could not reach the requested topic count.

    Carries the best topic count achieved and the parameter combinations
    tried, so callers can report what the search did.
    """

    def __init__(self, best_count, attempts):
        self.best_count = best_count
        self.attempts = list(attempts)
        msg = "best attempt yielded %d topic(s) after %d parameter combination(s)" % (
            best_count,
            len(self.attempts),
        )
        super().__init__(msg)


class TooManyThemes(PolicyTopicsError):
    """More than three themes were assigned to one cluster."""


class InconsistentAssignment(PolicyTopicsError):
    """An incoherent cluster carried a non-empty theme list."""


class NotFound(PolicyTopicsError):
    """Referenced document or topic does not exist."""


class EmptyInputError(PolicyTopicsError):
    """Aggregate statistic requested over an empty collection."""


class ReferentialError(PolicyTopicsError):
    """An assignment references a doc_id missing from the manifest."""


class PlacementError(PolicyTopicsError):
    """Word-cloud placement failed even after font shrinking."""
