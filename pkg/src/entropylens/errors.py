"""Exception hierarchy shared across the package.

Every error raised on a data or configuration problem derives from
:class:`EntropyLensError` so callers (CLI, HTTP service) can map the whole
family to a single exit code / status code while still reporting the
specific error name.
"""


class EntropyLensError(Exception):
    """Base class for all domain errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


# --- dataset loading / indexing ---

class MissingColumnConfig(EntropyLensError):
    """A CSV header column has no entry in the schema config."""


class RaggedRow(EntropyLensError):
    """A CSV row has a different cell count than the header."""


class EmptyDataset(EntropyLensError):
    """The CSV contains a header but no data rows."""


class UnknownColumn(EntropyLensError):
    """A referenced column does not exist in the dataset."""


class UnknownRecord(EntropyLensError):
    """A record id is outside 0..N-1."""


class ColumnAlreadyInSubset(EntropyLensError):
    """Attempt to refine a partition by a column it already groups on."""


class DuplicateColumn(EntropyLensError):
    """Two columns share the same name."""


# --- metrics / policy ---

class InvalidEpsilon0(EntropyLensError):
    """Risk threshold outside (0, 1]."""


class InvalidPolicy(EntropyLensError):
    """Risk policy fields violate their bounds."""


class NoQuasiColumns(EntropyLensError):
    """Analysis requested on a dataset with no quasi-identifier columns."""


class TooManyColumns(EntropyLensError):
    """Brute-force oracle guard: too many quasi columns to enumerate."""


# --- strategies ---

class SchemaMismatch(EntropyLensError):
    """A plan does not match the dataset schema it is applied to."""


class NoHierarchy(EntropyLensError):
    """The column has no generalization hierarchy."""


class NoHierarchies(EntropyLensError):
    """No quasi column carries a generalization hierarchy."""


class LevelOutOfRange(EntropyLensError):
    """Requested generalization level does not exist."""


class UnparseableCell(EntropyLensError):
    """A cell value does not fit the hierarchy's value kind."""


class InvalidHierarchy(EntropyLensError):
    """Hierarchy declaration violates the coarsening requirement."""


# --- linkage ---

class AmbiguousJoin(EntropyLensError):
    """A primary record matches two or more linked rows."""


# --- report io ---

class SchemaVersionMismatch(EntropyLensError):
    """Bundle produced by an incompatible major version."""


class MalformedDocument(EntropyLensError):
    """Bundle bytes are not a valid analysis document."""
