"""Generalization hierarchies: ordered coarsenings of a column's values.

Level 0 is always the identity mapping and the top level is total
suppression (every value maps to ``"*"``). Intermediate levels come from the
declared kind:

* ``numeric_bins`` — integer bin widths, each a multiple of the previous so
  bins nest;
* ``text_prefix`` — strictly decreasing prefix lengths;
* ``date_granularity`` — ISO dates truncated to ``day``/``month``/``year``;
* ``mapping_table`` — explicit per-level value maps.

The nesting constraint is what guarantees that raising a level can only
merge equivalence blocks, never split them.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .errors import InvalidHierarchy, LevelOutOfRange, UnparseableCell

SUPPRESSED = "*"

_ISO_DATE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")
_DATE_UNITS = ("day", "month", "year")


def _numeric_bin(width: int) -> Callable[[str], str]:
    def mapper(value: str) -> str:
        try:
            v = float(value)
        except ValueError:
            raise UnparseableCell(f"value {value!r} is not numeric")
        lo = int(v // width) * width
        return f"[{lo}-{lo + width - 1}]"

    return mapper


def _text_prefix(length: int) -> Callable[[str], str]:
    def mapper(value: str) -> str:
        return value[:length]

    return mapper


def _date_truncate(unit: str) -> Callable[[str], str]:
    def mapper(value: str) -> str:
        m = _ISO_DATE.match(value)
        if m is None:
            raise UnparseableCell(f"value {value!r} is not an ISO date")
        if unit == "day":
            return value
        if unit == "month":
            return f"{m.group(1)}-{m.group(2)}"
        return m.group(1)

    return mapper


def _table_lookup(table: dict[str, str]) -> Callable[[str], str]:
    def mapper(value: str) -> str:
        try:
            return table[value]
        except KeyError:
            raise UnparseableCell(f"value {value!r} missing from mapping table")

    return mapper


@dataclass(frozen=True)
class GeneralizationHierarchy:
    """Ordered coarsenings for one column, identity first, suppression last."""

    kind: str
    params: tuple = ()
    mappings: tuple = field(default=(), repr=False)

    @property
    def n_levels(self) -> int:
        # identity + declared intermediate levels + suppression
        return len(self.params) + 2 if self.kind != "mapping_table" else len(self.mappings) + 2

    @property
    def top_level(self) -> int:
        return self.n_levels - 1

    def mapper(self, level: int) -> Callable[[str], str]:
        if not 0 <= level <= self.top_level:
            raise LevelOutOfRange(
                f"level {level} outside 0..{self.top_level} for {self.kind} hierarchy"
            )
        if level == 0:
            return lambda value: value
        if level == self.top_level:
            return lambda value: SUPPRESSED
        if self.kind == "numeric_bins":
            return _numeric_bin(self.params[level - 1])
        if self.kind == "text_prefix":
            return _text_prefix(self.params[level - 1])
        if self.kind == "date_granularity":
            return _date_truncate(self.params[level - 1])
        return _table_lookup(self.mappings[level - 1])

    def apply(self, value: str, level: int) -> str:
        return self.mapper(level)(value)


def hierarchy_from_config(config: dict) -> GeneralizationHierarchy:
    """Build a hierarchy from its schema-config declaration, validating nesting."""
    kind = config.get("kind")
    if kind == "numeric_bins":
        widths = config.get("widths", [])
        if not widths or any(int(w) <= 0 for w in widths):
            raise InvalidHierarchy("numeric_bins requires positive widths")
        widths = [int(w) for w in widths]
        for prev, cur in zip(widths, widths[1:]):
            if cur % prev != 0:
                raise InvalidHierarchy(
                    f"bin width {cur} is not a multiple of {prev}; levels would not nest"
                )
        return GeneralizationHierarchy("numeric_bins", tuple(widths))
    if kind == "text_prefix":
        lengths = [int(n) for n in config.get("lengths", [])]
        if not lengths or any(n < 0 for n in lengths):
            raise InvalidHierarchy("text_prefix requires non-negative lengths")
        if any(b >= a for a, b in zip(lengths, lengths[1:])):
            raise InvalidHierarchy("text_prefix lengths must strictly decrease")
        return GeneralizationHierarchy("text_prefix", tuple(lengths))
    if kind == "date_granularity":
        units = tuple(config.get("units", []))
        if not units or any(u not in _DATE_UNITS for u in units):
            raise InvalidHierarchy(f"date units must be among {_DATE_UNITS}")
        if list(units) != sorted(units, key=_DATE_UNITS.index):
            raise InvalidHierarchy("date units must go from fine to coarse")
        return GeneralizationHierarchy("date_granularity", units)
    if kind == "mapping_table":
        levels = config.get("levels", [])
        mappings: list[dict[str, str]] = []
        for entry in levels:
            if isinstance(entry, str):
                entry = json.loads(Path(entry).read_text(encoding="utf-8"))
            mappings.append({str(k): str(v) for k, v in entry.items()})
        if not mappings:
            raise InvalidHierarchy("mapping_table requires at least one level")
        for prev, cur in zip([None] + mappings[:-1], mappings):
            if prev is None:
                continue
            # equal at level k must stay equal at level k+1
            seen: dict[str, str] = {}
            for raw, coarse in prev.items():
                if raw not in cur:
                    raise InvalidHierarchy(f"value {raw!r} dropped at a coarser level")
                if coarse in seen and seen[coarse] != cur[raw]:
                    raise InvalidHierarchy(
                        f"mapping level splits values grouped as {coarse!r}"
                    )
                seen.setdefault(coarse, cur[raw])
        return GeneralizationHierarchy("mapping_table", (), tuple(mappings))
    raise InvalidHierarchy(f"unknown hierarchy kind {kind!r}")


def hierarchy_to_config(h: GeneralizationHierarchy) -> dict:
    if h.kind == "numeric_bins":
        return {"kind": "numeric_bins", "widths": list(h.params)}
    if h.kind == "text_prefix":
        return {"kind": "text_prefix", "lengths": list(h.params)}
    if h.kind == "date_granularity":
        return {"kind": "date_granularity", "units": list(h.params)}
    return {"kind": "mapping_table", "levels": [dict(m) for m in h.mappings]}
