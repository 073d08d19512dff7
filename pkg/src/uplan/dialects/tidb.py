"""Readers for TiDB EXPLAIN output, table text and JSON formats.

Rows are identified by an operator id whose trailing ``_<n>`` suffix is a
per-plan counter, not part of the name, so it is stripped. Tree shape is
encoded by drawing glyphs in front of the id; each nesting level is two
columns wide. Filter rows (``Selection``) describe a condition on the
data produced beneath them rather than real work of their own, so they
fold away: each child gains a Configuration ``filter`` property with the
predicate and takes the filter row's place in the tree.
"""

from __future__ import annotations

import json
import re

from ..errors import ConversionError
from ..mapping import DialectMapping
from ..plan import Operation, PlanNode, Property, PropertyCategory, UnifiedPlan
from ..textform import parse_scalar
from .common import (
    find_outside_brackets,
    mapped_property,
    split_outside_brackets,
    unmapped_warning,
)

FAMILY = "tidb"
FILTER_OPERATION = "Selection"

_GLYPHS = set("│├└─—| `+-")
_ID_SUFFIX_RE = re.compile(r"_\d+$")

_COLUMN_ALIASES = {
    "id": "id",
    "estrows": "estRows",
    "count": "count",
    "estcost": "estCost",
    "task": "task",
    "tasktype": "task",
    "access object": "access object",
    "accessobject": "access object",
    "operator info": "operator info",
    "operatorinfo": "operator info",
}


def _strip_id(raw_id: str) -> str:
    return _ID_SUFFIX_RE.sub("", raw_id)


def _id_depth(cell: str) -> tuple[int, str]:
    """Split a raw id cell into (tree depth, operator id)."""
    position = 0
    while position < len(cell) and cell[position] in _GLYPHS:
        position += 1
    return position // 2, cell[position:].strip()


def _access_object_properties(text: str) -> list[Property]:
    properties: list[Property] = []
    for segment in split_outside_brackets(text):
        colon = find_outside_brackets(segment, ":")
        key = segment[:colon].strip() if colon >= 0 else ""
        value = segment[colon + 1 :].strip() if colon >= 0 else segment
        identifier = {
            "table": "name_object",
            "index": "name_index",
            "partition": "name_partition",
            "cte": "name_cte",
        }.get(key)
        if identifier is None:
            properties.append(
                Property(PropertyCategory.CONFIGURATION, "access_object", segment)
            )
        else:
            properties.append(Property(PropertyCategory.CONFIGURATION, identifier, value))
    return properties


def _operator_info_properties(
    text: str, mapping: DialectMapping, warnings: list[str]
) -> tuple[list[Property], str | None]:
    """Parse an operator-info cell.

    Returns the keyed properties plus the joined bare (predicate-shaped)
    content, which the caller either stores or folds into a filter.
    """
    properties: list[Property] = []
    bare: list[str] = []
    for item in split_outside_brackets(text):
        colon = find_outside_brackets(item, ":")
        if colon <= 0:
            bare.append(item)
            continue
        key = item[:colon].strip()
        value = item[colon + 1 :].strip()
        if key == "data":
            continue  # duplicate of the tree structure, with a random id
        properties.append(
            mapped_property(mapping, FAMILY, key, parse_scalar(value), warnings)
        )
    return properties, (", ".join(bare) if bare else None)


def _row_node(
    raw_name: str,
    cells: dict[str, str],
    mapping: DialectMapping,
    warnings: list[str],
) -> tuple[PlanNode, str | None]:
    category, identifier, hit = mapping.map_operation(FAMILY, raw_name)
    if not hit and raw_name != FILTER_OPERATION:
        # Filter rows get folded into their child, so a missing mapping
        # for them is expected, not worth a warning.
        warnings.append(unmapped_warning(FAMILY, "operation", raw_name))
    node = PlanNode(Operation(category, identifier))
    predicate: str | None = None
    for column in ("estRows", "count", "estCost", "task"):
        value = cells.get(column, "")
        if value:
            node.properties.append(
                mapped_property(mapping, FAMILY, column, parse_scalar(value), warnings)
            )
    access = cells.get("access object", "")
    if access:
        node.properties.extend(_access_object_properties(access))
    info = cells.get("operator info", "")
    if info:
        keyed, bare = _operator_info_properties(info, mapping, warnings)
        node.properties.extend(keyed)
        if raw_name == FILTER_OPERATION:
            predicate = bare
        elif bare:
            node.properties.append(
                Property(PropertyCategory.CONFIGURATION, "operator_info", bare)
            )
    return node, predicate


def _fold_filters(
    node: PlanNode,
    markers: dict[int, str | None],
    warnings: list[str],
) -> list[PlanNode]:
    replacement: list[PlanNode] = []
    for child in node.children:
        replacement.extend(_fold_filters(child, markers, warnings))
    node.children = replacement
    if id(node) not in markers:
        return [node]
    predicate = markers[id(node)]
    if not node.children:
        warnings.append("tidb: dropped a filter row with no child")
        return []
    for child in node.children:
        child.properties.append(
            Property(PropertyCategory.CONFIGURATION, "filter", predicate or "")
        )
    return node.children


def _finish(plan: UnifiedPlan, markers: dict[int, str | None]) -> UnifiedPlan:
    if plan.root is None:
        return plan
    roots = _fold_filters(plan.root, markers, plan.warnings)
    if not roots:
        plan.root = None
        plan.warnings.append("tidb: plan folded away entirely")
    else:
        if len(roots) > 1:
            plan.warnings.append("tidb: filter root had several children, kept the first")
        plan.root = roots[0]
    return plan


def convert_tidb_text(text: str, mapping: DialectMapping) -> UnifiedPlan:
    header: list[str] | None = None
    rows: list[tuple[int, str, dict[str, str]]] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or set(stripped) <= {"+", "-"}:
            continue
        if "|" in line:
            cells = line.split("|")
            cells = cells[1:-1] if len(cells) >= 3 else cells
        elif "\t" in line:
            cells = line.split("\t")
        else:
            continue
        if header is None:
            names = [_COLUMN_ALIASES.get(c.strip().lower()) for c in cells]
            if "id" not in names:
                raise ConversionError("missing header row naming the 'id' column")
            header = [name or f"column{i}" for i, name in enumerate(names)]
            continue
        row: dict[str, str] = {}
        id_cell = ""
        for name, cell in zip(header, cells):
            if name == "id":
                id_cell = cell.rstrip()
            else:
                row[name] = cell.strip()
        # The table pads each cell with one space after the pipe; the
        # remaining leading whitespace is part of the depth encoding.
        if id_cell.startswith(" "):
            id_cell = id_cell[1:]
        depth, raw_id = _id_depth(id_cell)
        if not raw_id:
            continue
        rows.append((depth, _strip_id(raw_id), row))
    if header is None:
        raise ConversionError("unparseable input: no table rows found")

    plan = UnifiedPlan()
    markers: dict[int, str | None] = {}
    stack: list[tuple[PlanNode, int]] = []
    for depth, raw_name, cells in rows:
        node, predicate = _row_node(raw_name, cells, mapping, plan.warnings)
        if raw_name == FILTER_OPERATION:
            node.properties = []  # folded away below; the predicate survives
            markers[id(node)] = predicate
        while stack and stack[-1][1] >= depth:
            stack.pop()
        if stack:
            stack[-1][0].children.append(node)
        elif plan.root is None:
            plan.root = node
        else:
            raise ConversionError(f"row {raw_name!r} has no parent")
        stack.append((node, depth))
    return _finish(plan, markers)


_JSON_KEYS = {
    "id",
    "estRows",
    "estCost",
    "taskType",
    "accessObject",
    "operatorInfo",
    "subOperators",
}


def _node_from_json(
    obj: dict,
    mapping: DialectMapping,
    plan: UnifiedPlan,
    markers: dict[int, str | None],
) -> PlanNode:
    if "id" not in obj:
        raise ConversionError("operator object is missing 'id'")
    raw_name = _strip_id(str(obj["id"]).strip())
    category, identifier, hit = mapping.map_operation(FAMILY, raw_name)
    if not hit and raw_name != FILTER_OPERATION:
        plan.warnings.append(unmapped_warning(FAMILY, "operation", raw_name))
    node = PlanNode(Operation(category, identifier))
    predicate: str | None = None
    for key, value in obj.items():
        if key in ("id", "subOperators"):
            continue
        if key not in _JSON_KEYS:
            if isinstance(value, (str, int, float, bool)) or value is None:
                node.properties.append(
                    mapped_property(mapping, FAMILY, key, value, plan.warnings)
                )
            else:
                plan.warnings.append(f"tidb: skipped structured attribute {key!r}")
            continue
        if key == "accessObject":
            if value:
                node.properties.extend(_access_object_properties(str(value)))
            continue
        if key == "operatorInfo":
            if value:
                keyed, bare = _operator_info_properties(
                    str(value), mapping, plan.warnings
                )
                node.properties.extend(keyed)
                if raw_name == FILTER_OPERATION:
                    predicate = bare
                elif bare:
                    node.properties.append(
                        Property(PropertyCategory.CONFIGURATION, "operator_info", bare)
                    )
            continue
        if value == "" or value is None:
            continue
        scalar = parse_scalar(value) if isinstance(value, str) else value
        node.properties.append(
            mapped_property(mapping, FAMILY, key, scalar, plan.warnings)
        )
    if raw_name == FILTER_OPERATION:
        node.properties = []
        markers[id(node)] = predicate
    for child in obj.get("subOperators", []) or []:
        if isinstance(child, dict):
            node.children.append(_node_from_json(child, mapping, plan, markers))
    return node


def convert_tidb_json(text: str, mapping: DialectMapping) -> UnifiedPlan:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConversionError(f"unparseable input: {exc}") from exc
    if isinstance(doc, dict):
        doc = [doc]
    if not isinstance(doc, list):
        raise ConversionError("expected a JSON array of operator objects")
    plan = UnifiedPlan()
    markers: dict[int, str | None] = {}
    objects = [item for item in doc if isinstance(item, dict)]
    if not objects:
        plan.warnings.append("tidb: empty plan document")
        return plan
    if len(objects) > 1:
        plan.warnings.append("tidb: several root operators, kept the first")
    plan.root = _node_from_json(objects[0], mapping, plan, markers)
    return _finish(plan, markers)
