"""Immutable tabular dataset, column classification, and equivalence-class
partitions built by partition refinement.

All cells are normalized text (surrounding whitespace trimmed, optional case
folding). The empty string is a legitimate value and forms its own
equivalence key. A :class:`PartitionIndex` stores the partition as a label
array (record -> block index) plus block sizes, which keeps refinement and
entropy computation vectorized; per-block member lists and key tuples are
materialized lazily.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ColumnAlreadyInSubset,
    DuplicateColumn,
    EmptyDataset,
    MissingColumnConfig,
    RaggedRow,
    UnknownColumn,
    UnknownRecord,
)
from .hierarchies import GeneralizationHierarchy, hierarchy_from_config


class ColumnClass(str, Enum):
    DIRECT = "direct"
    QUASI = "quasi"
    SENSITIVE = "sensitive"
    NON_IDENTIFYING = "non_identifying"


@dataclass(frozen=True)
class ColumnMeta:
    name: str
    column_class: ColumnClass
    consented: bool = True
    hierarchy: GeneralizationHierarchy | None = None


def normalize_cell(value: str, fold_case: bool = False) -> str:
    value = value.strip()
    return value.casefold() if fold_case else value


class Dataset:
    """One table of normalized text cells with per-column classification.

    Immutable after construction; record ids are row positions 0..N-1 in
    input order.
    """

    def __init__(self, columns: Sequence[ColumnMeta], rows: Iterable[Sequence[str]],
                 name: str = "table"):
        columns = tuple(columns)
        names = [c.name for c in columns]
        if len(set(names)) != len(names):
            raise DuplicateColumn(f"duplicate column names in {names}")
        materialized = [tuple(row) for row in rows]
        if not materialized:
            raise EmptyDataset("dataset must contain at least one row")
        for i, row in enumerate(materialized):
            if len(row) != len(columns):
                raise RaggedRow(
                    f"row {i} has {len(row)} cells, expected {len(columns)}"
                )
        self._columns = columns
        self._position = {c.name: i for i, c in enumerate(columns)}
        self._values = {
            c.name: np.array([row[i] for row in materialized], dtype=object)
            for i, c in enumerate(columns)
        }
        self._n = len(materialized)
        self._codes: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        self.name = name

    # --- basic accessors ---

    @property
    def columns(self) -> tuple[ColumnMeta, ...]:
        return self._columns

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self._columns)

    @property
    def n_records(self) -> int:
        return self._n

    def meta(self, name: str) -> ColumnMeta:
        self._check_column(name)
        return self._columns[self._position[name]]

    def position(self, name: str) -> int:
        self._check_column(name)
        return self._position[name]

    def column_values(self, name: str) -> np.ndarray:
        self._check_column(name)
        return self._values[name]

    def row(self, record_id: int) -> tuple[str, ...]:
        if not 0 <= record_id < self._n:
            raise UnknownRecord(f"record {record_id} outside 0..{self._n - 1}")
        return tuple(self._values[c.name][record_id] for c in self._columns)

    def iter_rows(self) -> Iterable[tuple[str, ...]]:
        cols = [self._values[c.name] for c in self._columns]
        for i in range(self._n):
            yield tuple(col[i] for col in cols)

    def columns_of_class(self, column_class: ColumnClass) -> tuple[str, ...]:
        return tuple(c.name for c in self._columns if c.column_class is column_class)

    @property
    def quasi_columns(self) -> tuple[str, ...]:
        return self.columns_of_class(ColumnClass.QUASI)

    @property
    def direct_columns(self) -> tuple[str, ...]:
        return self.columns_of_class(ColumnClass.DIRECT)

    def _check_column(self, name: str) -> None:
        if name not in self._position:
            raise UnknownColumn(f"no column named {name!r}")

    # --- derived structures ---

    def column_codes(self, name: str) -> tuple[np.ndarray, int]:
        """Integer codes for a column, assigned in sorted value order.

        Sorted assignment makes block orderings canonical: ordering blocks
        by code is ordering them by value.
        """
        self._check_column(name)
        cached = self._codes.get(name)
        if cached is None:
            uniques, codes = np.unique(
                self._values[name].astype(str), return_inverse=True
            )
            cached = (codes.astype(np.int64), uniques)
            self._codes[name] = cached
        return cached[0], len(cached[1])

    def subset(self, names: Iterable[str]) -> "ColumnSubset":
        return ColumnSubset.of(self, names)

    def digest(self) -> str:
        """Content digest over schema and cells; stable across processes."""
        h = hashlib.sha256()
        for c in self._columns:
            h.update(f"{c.name}\x1f{c.column_class.value}\x1f{c.consented}\x1e".encode())
        for row in self.iter_rows():
            h.update("\x1f".join(row).encode())
            h.update(b"\x1e")
        return h.hexdigest()

    # --- construction of variants (originals are never mutated) ---

    def with_values(self, name: str, values: Sequence[str],
                    meta: ColumnMeta | None = None) -> "Dataset":
        self._check_column(name)
        pos = self._position[name]
        columns = list(self._columns)
        if meta is not None:
            columns[pos] = meta
        rows = []
        for i, row in enumerate(self.iter_rows()):
            row = list(row)
            row[pos] = values[i]
            rows.append(row)
        return Dataset(columns, rows, name=self.name)

    def select_columns(self, names: Sequence[str], name: str | None = None) -> "Dataset":
        for n in names:
            self._check_column(n)
        columns = [self.meta(n) for n in names]
        cols = [self._values[n] for n in names]
        rows = [tuple(col[i] for col in cols) for i in range(self._n)]
        return Dataset(columns, rows, name=name or self.name)

    def with_column(self, meta: ColumnMeta, values: Sequence[str]) -> "Dataset":
        if meta.name in self._position:
            raise DuplicateColumn(f"column {meta.name!r} already exists")
        columns = list(self._columns) + [meta]
        rows = [row + (values[i],) for i, row in enumerate(self.iter_rows())]
        return Dataset(columns, rows, name=self.name)

    def with_meta(self, name: str, meta: ColumnMeta) -> "Dataset":
        self._check_column(name)
        columns = list(self._columns)
        columns[self._position[name]] = meta
        return Dataset(columns, list(self.iter_rows()), name=self.name)


@dataclass(frozen=True)
class ColumnSubset:
    """A duplicate-free set of columns, canonically ordered by column position."""

    columns: tuple[str, ...]

    @classmethod
    def of(cls, dataset: Dataset, names: Iterable[str]) -> "ColumnSubset":
        unique = dict.fromkeys(names)
        ordered = sorted(unique, key=dataset.position)
        return cls(tuple(ordered))

    def __len__(self) -> int:
        return len(self.columns)

    def __iter__(self):
        return iter(self.columns)

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    def issubset(self, other: "ColumnSubset") -> bool:
        return set(self.columns) <= set(other.columns)

    def union(self, dataset: Dataset, names: Iterable[str]) -> "ColumnSubset":
        return ColumnSubset.of(dataset, (*self.columns, *names))


def subset_sort_key(dataset: Dataset, subset: ColumnSubset) -> tuple:
    """Canonical enumeration order: by size, then by column positions."""
    return (len(subset), tuple(dataset.position(c) for c in subset.columns))


@dataclass(frozen=True, eq=False)
class EquivalenceBlock:
    key: tuple[str, ...]
    record_ids: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.record_ids)


class PartitionIndex:
    """Partition of records by equality on a column subset's value tuple.

    Blocks are ordered canonically: lexicographically by key over the
    subset's canonical column order.
    """

    def __init__(self, dataset: Dataset, subset: ColumnSubset,
                 labels: np.ndarray, sizes: np.ndarray):
        self.dataset = dataset
        self.subset = subset
        self.labels = labels
        self.sizes = sizes
        self._blocks: list[EquivalenceBlock] | None = None

    @property
    def n_blocks(self) -> int:
        return len(self.sizes)

    @property
    def blocks(self) -> list[EquivalenceBlock]:
        if self._blocks is None:
            order = np.argsort(self.labels, kind="stable")
            bounds = np.cumsum(self.sizes)[:-1]
            groups = np.split(order, bounds)
            cols = [self.dataset.column_values(c) for c in self.subset.columns]
            self._blocks = [
                EquivalenceBlock(
                    key=tuple(col[g[0]] for col in cols),
                    record_ids=tuple(int(r) for r in g),
                )
                for g in groups
            ]
        return self._blocks

    def block_of(self, record_id: int) -> EquivalenceBlock:
        if not 0 <= record_id < self.dataset.n_records:
            raise UnknownRecord(
                f"record {record_id} outside 0..{self.dataset.n_records - 1}"
            )
        return self.blocks[int(self.labels[record_id])]

    def block_size_of(self, record_id: int) -> int:
        if not 0 <= record_id < self.dataset.n_records:
            raise UnknownRecord(
                f"record {record_id} outside 0..{self.dataset.n_records - 1}"
            )
        return int(self.sizes[self.labels[record_id]])

    def record_block_sizes(self) -> np.ndarray:
        return self.sizes[self.labels]


def _refine_labels(labels: np.ndarray, codes: np.ndarray,
                   n_codes: int) -> tuple[np.ndarray, np.ndarray]:
    combined = labels * np.int64(n_codes) + codes
    _, new_labels, sizes = np.unique(combined, return_inverse=True, return_counts=True)
    return new_labels.astype(np.int64), sizes


def _canonicalize(dataset: Dataset, subset: ColumnSubset, labels: np.ndarray,
                  sizes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reorder blocks lexicographically by key in canonical column order."""
    n_blocks = len(sizes)
    reps = np.empty(n_blocks, dtype=np.int64)
    reps[labels[::-1]] = np.arange(len(labels) - 1, -1, -1)
    keys = [dataset.column_codes(c)[0][reps] for c in subset.columns]
    perm = np.lexsort(keys[::-1])  # primary sort key is the first subset column
    inverse = np.empty(n_blocks, dtype=np.int64)
    inverse[perm] = np.arange(n_blocks)
    return inverse[labels], sizes[perm]


def build_partition(dataset: Dataset, subset: ColumnSubset) -> PartitionIndex:
    """Group records by their value tuple over ``subset``.

    The empty subset yields the single all-records block. Columns are folded
    in canonical order, so blocks come out canonically ordered without a
    final sort.
    """
    labels = np.zeros(dataset.n_records, dtype=np.int64)
    sizes = np.array([dataset.n_records], dtype=np.int64)
    for name in subset.columns:
        codes, n_codes = dataset.column_codes(name)
        labels, sizes = _refine_labels(labels, codes, n_codes)
    return PartitionIndex(dataset, subset, labels, sizes)


def refine_partition(parent: PartitionIndex, column: str) -> PartitionIndex:
    """Split each parent block by one more column; O(N log N), independent of
    how many subsets have been built before."""
    dataset = parent.dataset
    dataset._check_column(column)
    if column in parent.subset:
        raise ColumnAlreadyInSubset(f"column {column!r} already in {parent.subset.columns}")
    codes, n_codes = dataset.column_codes(column)
    labels, sizes = _refine_labels(parent.labels, codes, n_codes)
    subset = parent.subset.union(dataset, [column])
    # appending a later-positioned column preserves canonical block order
    if parent.subset.columns and dataset.position(column) < dataset.position(
            parent.subset.columns[-1]):
        labels, sizes = _canonicalize(dataset, subset, labels, sizes)
    return PartitionIndex(dataset, subset, labels, sizes)


def block_of(partition: PartitionIndex, record_id: int) -> EquivalenceBlock:
    return partition.block_of(record_id)


# --- loading ---

def parse_schema_config(config: dict) -> dict[str, ColumnMeta]:
    """Parse the schema-config document into per-column metadata."""
    metas: dict[str, ColumnMeta] = {}
    for entry in config.get("columns", []):
        name = entry["name"]
        column_class = ColumnClass(entry["class"])
        hierarchy = None
        if "hierarchy" in entry and entry["hierarchy"] is not None:
            hierarchy = hierarchy_from_config(entry["hierarchy"])
        metas[name] = ColumnMeta(
            name=name,
            column_class=column_class,
            consented=bool(entry.get("consented", True)),
            hierarchy=hierarchy,
        )
    return metas


def load_dataset(source, config: dict, fold_case: bool = False,
                 name: str = "table") -> Dataset:
    """Read a CSV (UTF-8, header row, RFC-4180) against a schema config.

    ``source`` may be a path, bytes, or a text stream. Every header column
    must have a config entry; rows must be rectangular.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDataset("CSV has no header row")
    header = [normalize_cell(h) for h in header]
    metas = parse_schema_config(config)
    missing = [h for h in header if h not in metas]
    if missing:
        raise MissingColumnConfig(f"no schema entry for column(s) {missing}")
    columns = [metas[h] for h in header]
    rows = []
    for i, raw in enumerate(reader):
        if not raw:
            continue  # blank line
        if len(raw) != len(header):
            raise RaggedRow(f"row {i} has {len(raw)} cells, expected {len(header)}")
        rows.append(tuple(normalize_cell(cell, fold_case) for cell in raw))
    if not rows:
        raise EmptyDataset("CSV contains a header but no data rows")
    return Dataset(columns, rows, name=name)


def load_schema_file(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
