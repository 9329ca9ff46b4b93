"""One-hop linkage: widen the primary table with attributes reachable
through a functional join, so they get analyzed as additional
quasi-identifiers of the primary individuals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dataset import ColumnClass, ColumnMeta, Dataset
from .errors import AmbiguousJoin, UnknownColumn

MISSING = ""


@dataclass(frozen=True)
class LinkSpec:
    local_key: str
    foreign_key: str
    imported_columns: tuple[str, ...]
    classes: dict[str, ColumnClass] = field(default_factory=dict)

    def class_of(self, column: str) -> ColumnClass:
        return self.classes.get(column, ColumnClass.QUASI)


def link_spec_from_config(config: dict) -> LinkSpec:
    imported = config.get("imported_columns", [])
    names: list[str] = []
    classes: dict[str, ColumnClass] = {}
    for entry in imported:
        if isinstance(entry, str):
            names.append(entry)
        else:
            names.append(entry["name"])
            if "class" in entry:
                classes[entry["name"]] = ColumnClass(entry["class"])
    return LinkSpec(
        local_key=config["local_key"],
        foreign_key=config["foreign_key"],
        imported_columns=tuple(names),
        classes=classes,
    )


def attach_linked_table(primary: Dataset, linked: Dataset,
                        spec: LinkSpec) -> Dataset:
    """Import columns from ``linked`` into a widened copy of ``primary``.

    The join must be functional: each primary record matches at most one
    linked row. Unmatched records receive the distinct missing value, which
    cannot split any existing partition block structure beyond what the
    imported values themselves do.
    """
    if spec.local_key not in primary.column_names:
        raise UnknownColumn(f"local key {spec.local_key!r} not in primary table")
    if spec.foreign_key not in linked.column_names:
        raise UnknownColumn(f"foreign key {spec.foreign_key!r} not in linked table")
    for col in spec.imported_columns:
        if col not in linked.column_names:
            raise UnknownColumn(f"imported column {col!r} not in linked table")
        if col == spec.foreign_key:
            raise UnknownColumn("foreign key cannot be imported")

    local_keys = set(primary.column_values(spec.local_key))
    fk = linked.column_values(spec.foreign_key)
    row_for_key: dict[str, int] = {}
    for i, key in enumerate(fk):
        if key in row_for_key and key in local_keys:
            raise AmbiguousJoin(
                f"linked key {key!r} matches multiple rows ({row_for_key[key]}, {i})"
            )
        row_for_key.setdefault(key, i)

    keys = primary.column_values(spec.local_key)
    out = primary
    for col in spec.imported_columns:
        source = linked.column_values(col)
        values = [
            source[row_for_key[k]] if k in row_for_key else MISSING
            for k in keys
        ]
        meta = ColumnMeta(f"{linked.name}.{col}", spec.class_of(col))
        out = out.with_column(meta, values)
    return out
