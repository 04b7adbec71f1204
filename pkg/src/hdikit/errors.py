"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: usage problems exit 1, DataError
subclasses exit 2, NumericError subclasses exit 3.
"""


class HdikitError(Exception):
    """Base class for all toolkit errors."""


class DataError(HdikitError):
    """Invalid, inconsistent, or unusable input data."""


class NumericError(HdikitError):
    """Numerical failure during model fitting."""


# --- ingestion ---

class MalformedHeaderError(DataError):
    """Header row lacks identifiable region/indicator/year columns."""


class DuplicateKeyError(DataError):
    """The same (region, indicator) row appears more than once."""


class UnparsableCellError(DataError):
    """A non-blank cell is not a finite number."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class UnknownRegionError(DataError):
    """A requested region is absent from the table."""


class UnknownIndicatorError(DataError):
    """A requested indicator is absent from the table."""


class EmptyResultError(DataError):
    """A join or filter produced no rows; signaled, never silent."""


class MissingIndicatorError(DataError):
    """A dataset build cannot resolve one of its required indicators."""


class BadConfigError(DataError):
    """Config file is unreadable, unversioned, or has invalid values."""


# --- datasets / features ---

class NonFiniteInputError(DataError):
    """An input value is NaN or infinite."""


class DatasetTooSmallError(DataError):
    """Fewer rows than the operation needs (e.g. splitting n < 2)."""


# --- network ---

class BadTopologyError(DataError):
    """Layer sizes do not describe a valid feedforward network."""


class DimensionMismatchError(DataError):
    """Input shape is inconsistent with the model or its labels."""


class DivergedLossError(NumericError):
    """Training loss became non-finite."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class CorruptModelFileError(DataError):
    """Model file failed its magic, version, or checksum validation."""


# --- clustering ---

class TooFewPointsError(DataError):
    """Fewer points than clusters requested."""


class DegenerateInputError(DataError):
    """Fewer distinct points than clusters requested."""


# --- evaluation ---

class LengthMismatchError(DataError):
    """Paired sequences have different lengths."""


class EmptyInputError(DataError):
    """An operation that needs at least one element got none."""
