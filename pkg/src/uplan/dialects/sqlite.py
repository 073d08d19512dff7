"""Reader for SQLite EXPLAIN QUERY PLAN tree output.

Each line is one operation. Depth comes from the drawing prefix
(``|--``, ``` `-- ```, ``|  ``), three columns per level. Operation
names are matched by longest known prefix because they contain spaces
("USE TEMP B-TREE", "LEFT-MOST SUBQUERY"); the rest of the line holds
the scanned object and USING/FOR clauses. SQLite reports no row
estimates or cost scores, so nodes carry Configuration properties only.
"""

from __future__ import annotations

import re

from ..mapping import DialectMapping
from ..plan import Operation, PlanNode, Property, PropertyCategory, UnifiedPlan
from .common import unmapped_warning

FAMILY = "sqlite"

_PREFIX_CHARS = set("|` -")

# Operations whose first argument is the scanned or produced object.
_OBJECT_OPS = {
    "SCAN",
    "SEARCH",
    "MATERIALIZE",
    "CO-ROUTINE",
    "LIST SUBQUERY",
    "SCALAR SUBQUERY",
    "CORRELATED SCALAR SUBQUERY",
}

_OBJECT_RE = re.compile(
    r"(?P<object>\S+)"
    r"(?:\s+AS\s+(?P<alias>\S+))?"
    r"(?:\s+(?P<clause>USING|FOR)\s+(?P<clause_text>.*))?$"
)


def _depth_and_body(line: str) -> tuple[int, str]:
    pos = 0
    while pos < len(line) and line[pos] in _PREFIX_CHARS:
        pos += 1
    return pos // 3, line[pos:].rstrip()


def _match_operation(body: str, names: list[str]) -> tuple[str, str] | None:
    for name in names:
        if body == name:
            return name, ""
        if body.startswith(name + " "):
            return name, body[len(name) + 1 :]
    return None


def _clause_property(keyword: str, text: str) -> Property:
    identifier = "using" if keyword == "USING" else "for_clause"
    return Property(PropertyCategory.CONFIGURATION, identifier, text.strip())


def _body_properties(raw_name: str, remainder: str) -> list[Property]:
    rest = remainder.strip()
    if not rest:
        return []
    if rest.startswith("USING "):
        return [_clause_property("USING", rest[len("USING ") :])]
    if rest.startswith("FOR "):
        return [_clause_property("FOR", rest[len("FOR ") :])]
    if raw_name in _OBJECT_OPS:
        match = _OBJECT_RE.match(rest)
        if match is not None:
            properties = [
                Property(PropertyCategory.CONFIGURATION, "name_object", match["object"])
            ]
            if match["alias"]:
                properties.append(
                    Property(PropertyCategory.CONFIGURATION, "name_alias", match["alias"])
                )
            if match["clause"]:
                properties.append(
                    _clause_property(match["clause"], match["clause_text"] or "")
                )
            return properties
    return [Property(PropertyCategory.CONFIGURATION, "detail", rest)]


def convert_sqlite_text(text: str, mapping: DialectMapping) -> UnifiedPlan:
    plan = UnifiedPlan()
    # Longest name first so "UNION ALL" wins over "UNION".
    names = sorted(mapping.operation_names(FAMILY), key=len, reverse=True)
    stack: list[tuple[int, PlanNode]] = []
    for line in text.splitlines():
        if not line.strip() or line.strip() == "QUERY PLAN":
            continue
        depth, body = _depth_and_body(line)
        if not body:
            continue
        matched = _match_operation(body, names)
        if matched is None:
            raw_name, _, remainder = body.partition(" ")
            plan.warnings.append(unmapped_warning(FAMILY, "operation", raw_name))
        else:
            raw_name, remainder = matched
        category, identifier, _ = mapping.map_operation(FAMILY, raw_name)
        node = PlanNode(
            Operation(category, identifier),
            properties=_body_properties(raw_name, remainder),
        )
        while stack and stack[-1][0] >= depth:
            stack.pop()
        if stack:
            stack[-1][1].children.append(node)
        elif plan.root is None:
            plan.root = node
        else:
            plan.warnings.append("sqlite: several top-level entries, kept the first tree")
            continue
        stack.append((depth, node))
    return plan
