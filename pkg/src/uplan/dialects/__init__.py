"""Dialect readers: one parser per supported EXPLAIN flavor."""

from __future__ import annotations

import enum

from ..mapping import DialectMapping, default_mapping
from ..plan import UnifiedPlan
from .mysql import convert_mysql_json
from .postgresql import convert_postgresql_json, convert_postgresql_text
from .sqlite import convert_sqlite_text
from .tidb import convert_tidb_json, convert_tidb_text


class Dialect(enum.Enum):
    POSTGRESQL_TEXT = "postgresql_text"
    POSTGRESQL_JSON = "postgresql_json"
    MYSQL_JSON = "mysql_json"
    TIDB_TEXT = "tidb_text"
    TIDB_JSON = "tidb_json"
    SQLITE_TEXT = "sqlite_text"


_CONVERTERS = {
    Dialect.POSTGRESQL_TEXT: convert_postgresql_text,
    Dialect.POSTGRESQL_JSON: convert_postgresql_json,
    Dialect.MYSQL_JSON: convert_mysql_json,
    Dialect.TIDB_TEXT: convert_tidb_text,
    Dialect.TIDB_JSON: convert_tidb_json,
    Dialect.SQLITE_TEXT: convert_sqlite_text,
}


def convert(
    dialect: Dialect | str, text: str, mapping: DialectMapping | None = None
) -> UnifiedPlan:
    """Parse one serialized plan into the unified representation.

    Empty or whitespace-only input is not an error: it yields a plan
    with no root and a warning, for all dialects alike.
    """
    if isinstance(dialect, str):
        dialect = Dialect(dialect)
    if mapping is None:
        mapping = default_mapping()
    if not text.strip():
        plan = UnifiedPlan()
        plan.warnings.append(f"{dialect.value}: empty input, produced a plan with no root")
    else:
        plan = _CONVERTERS[dialect](text, mapping)
    plan.dialect = dialect.value
    return plan


__all__ = [
    "Dialect",
    "convert",
    "convert_mysql_json",
    "convert_postgresql_json",
    "convert_postgresql_text",
    "convert_sqlite_text",
    "convert_tidb_json",
    "convert_tidb_text",
]
