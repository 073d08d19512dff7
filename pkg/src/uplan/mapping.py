"""Declarative name mapping from dialect-specific names to unified ones.

A mapping table is UTF-8, line-oriented, tab-separated, five fields:

    family<TAB>kind<TAB>raw_name<TAB>category<TAB>unified_identifier

``family`` groups entries by source system (``postgresql``, ``mysql``,
``tidb``, ``sqlite``); ``kind`` is ``operation`` or ``property``. Lines
starting with ``#`` and blank lines are ignored. Duplicate
(family, kind, raw_name) keys are rejected.

Lookups that find no entry fall back to a default category (Executor for
operations, Configuration for properties) with the canonicalized raw name
as identifier; the caller is told the lookup missed so it can record a
warning. Extending coverage to a new engine or version is therefore a
data-file edit, not a code change.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import MappingError
from .plan import (
    OPERATION_CATEGORY_NAMES,
    PROPERTY_CATEGORY_NAMES,
    OperationCategory,
    PropertyCategory,
    canonical_keyword,
    is_valid_keyword,
)

KIND_OPERATION = "operation"
KIND_PROPERTY = "property"


@dataclass(frozen=True)
class MappingEntry:
    """One row of a mapping table."""

    family: str
    kind: str
    raw_name: str
    category: OperationCategory | PropertyCategory
    unified_identifier: str


def safe_keyword(raw: str) -> str:
    """Force a raw name into valid keyword form for fallback identifiers."""
    text = canonical_keyword(raw)
    text = re.sub(r"[^A-Za-z0-9_]+", "_", text)
    text = re.sub(r"_{2,}", "_", text).strip("_")
    text = re.sub(r"^[0-9_]+", "", text)
    return text or "Unknown"


@dataclass
class DialectMapping:
    """A loaded mapping table plus the fallback rules."""

    entries: dict[tuple[str, str, str], MappingEntry] = field(default_factory=dict)
    fallback_operation_category: OperationCategory = OperationCategory.EXECUTOR
    fallback_property_category: PropertyCategory = PropertyCategory.CONFIGURATION

    def add(self, entry: MappingEntry) -> None:
        key = (entry.family, entry.kind, entry.raw_name)
        if key in self.entries:
            raise MappingError(
                f"duplicate mapping for {entry.family}/{entry.kind}/{entry.raw_name!r}"
            )
        self.entries[key] = entry

    def map_operation(self, family: str, raw_name: str) -> tuple[OperationCategory, str, bool]:
        """Resolve an operation name. Returns (category, identifier, mapped)."""
        entry = self.entries.get((family, KIND_OPERATION, raw_name))
        if entry is not None:
            assert isinstance(entry.category, OperationCategory)
            return entry.category, entry.unified_identifier, True
        return self.fallback_operation_category, safe_keyword(raw_name), False

    def map_property(self, family: str, raw_name: str) -> tuple[PropertyCategory, str, bool]:
        """Resolve a property name. Returns (category, identifier, mapped)."""
        entry = self.entries.get((family, KIND_PROPERTY, raw_name))
        if entry is not None:
            assert isinstance(entry.category, PropertyCategory)
            return entry.category, entry.unified_identifier, True
        return self.fallback_property_category, safe_keyword(raw_name), False

    def operation_names(self, family: str) -> list[str]:
        """All raw operation names known for a family."""
        return [
            raw
            for (fam, kind, raw) in self.entries
            if fam == family and kind == KIND_OPERATION
        ]


def load_mapping(source: str) -> DialectMapping:
    """Parse mapping-file text into a DialectMapping.

    Raises MappingError (with the line number) on a malformed line, an
    unknown category name, a duplicate key, or an invalid unified
    identifier.
    """
    mapping = DialectMapping()
    for lineno, line in enumerate(source.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = line.rstrip("\n").split("\t")
        if len(fields) != 5:
            raise MappingError(
                f"expected 5 tab-separated fields, found {len(fields)}", lineno
            )
        family, kind, raw_name, category_name, unified = (f.strip() for f in fields)
        if kind == KIND_OPERATION:
            category = OPERATION_CATEGORY_NAMES.get(category_name)
            if category is None:
                raise MappingError(
                    f"unknown operation category name {category_name!r}", lineno
                )
        elif kind == KIND_PROPERTY:
            category = PROPERTY_CATEGORY_NAMES.get(category_name)
            if category is None:
                raise MappingError(
                    f"unknown property category name {category_name!r}", lineno
                )
        else:
            raise MappingError(f"unknown kind {kind!r}", lineno)
        if not is_valid_keyword(unified):
            raise MappingError(f"invalid unified identifier {unified!r}", lineno)
        try:
            mapping.add(MappingEntry(family, kind, raw_name, category, unified))
        except MappingError as exc:
            raise MappingError(str(exc), lineno) from None
    return mapping


_default: DialectMapping | None = None


def default_mapping() -> DialectMapping:
    """The built-in table shipped with the package (loaded once)."""
    global _default
    if _default is None:
        text = (
            resources.files("uplan").joinpath("data/default_mapping.tsv").read_text("utf-8")
        )
        _default = load_mapping(text)
    return _default
