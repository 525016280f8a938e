"""Exception hierarchy shared across the pipeline.

Each class carries the CLI exit code it maps to: 2 for usage/config/schema
problems, 3 for I/O and on-disk format problems, 4 for numeric/data failures.
"""


class DebrisSpectraError(Exception):
    exit_code = 2


class ParseError(DebrisSpectraError):
    """Malformed row or cell in an input file."""


class SchemaError(DebrisSpectraError):
    """Structurally valid input that violates the data model."""


class DomainError(DebrisSpectraError):
    """Value outside its documented domain."""


class ConfigError(DebrisSpectraError):
    """Invalid run configuration."""


class MissingFeature(DebrisSpectraError):
    """Requested feature absent or undefined on a record."""


class MissingMaterial(DebrisSpectraError):
    """Signature library lacks a required material."""


class OutOfSpan(DebrisSpectraError):
    """Band center outside the sampled wavelength range."""


class ResolutionError(DebrisSpectraError):
    """Raster resolution unsuitable for the requested operation."""


class ShapeMismatch(DebrisSpectraError):
    """Raster or matrix dimensions disagree."""


class DimensionMismatch(DebrisSpectraError):
    """Vector/matrix width differs from what a model expects."""


class NotIndexed(DebrisSpectraError):
    """Operation requires indices to have been computed first."""


class IdCollision(DebrisSpectraError):
    """Duplicate pixel ids while id remapping is disabled."""


class FeatureSetMismatch(DebrisSpectraError):
    """Model was fitted on a different feature set."""


class FormatError(DebrisSpectraError):
    """Corrupt or truncated binary artifact."""

    exit_code = 3


class NumericError(DebrisSpectraError):
    exit_code = 4


class EmptySample(NumericError):
    """Statistical test fed an empty sample."""


class TooFewSamples(NumericError):
    """Not enough rows for the requested statistic."""


class TooFewRows(NumericError):
    """Fewer rows than clusters."""


class SingleClass(NumericError):
    """Classifier needs at least two classes."""


class EmptySelection(NumericError):
    """Filter left no records."""


class NoEligibleCandidate(NumericError):
    """Correlation gate left fewer than two candidate features."""
