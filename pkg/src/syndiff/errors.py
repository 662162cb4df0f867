"""Exception hierarchy shared across the toolkit.

Every domain error raised by this package derives from :class:`SyndiffError`,
so callers (notably the CLI) can distinguish bad inputs from bugs.
"""


class SyndiffError(Exception):
    """Base class for all toolkit errors."""


class ConlluParseError(SyndiffError):
    """Malformed CoNLL-U input. Carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class LdebFormatError(SyndiffError):
    """Embedding file violates the LDEB format (magic, version, header fields)."""


class LdebCorruptionError(SyndiffError):
    """Embedding file ends or breaks mid-record. Carries the byte offset."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class DatasetJoinError(SyndiffError):
    """A relation instance refers to a (sentence, token) pair the embedding set lacks."""


class EmptyDatasetError(SyndiffError):
    """No joinable relation instances; a labeled dataset would be empty."""


class SinkhornNumericalError(SyndiffError):
    """Scaling iterations produced NaN; usually cured by a larger regularization."""


class DegenerateTaskError(SyndiffError):
    """A classification task with fewer than two labels."""


class ScoringError(SyndiffError):
    """Evaluation impossible: unseen labels or an empty evaluation set."""


class TypologyDataError(SyndiffError):
    """Inconsistent typological data: zero vectors, unknown features, bad tables."""


class RegressionDataError(SyndiffError):
    """Regression inputs unusable: NaN after imputation, feature-count mismatch."""


class AnalysisError(SyndiffError):
    """Statistical glue failure: too few pairs, incomplete tables, bad relevances."""
