"""Reader for MySQL EXPLAIN FORMAT=JSON output.

Nested object keys such as ``table``, ``nested_loop``,
``ordering_operation`` and ``grouping_operation`` are the operation
indicators; each becomes a node through the mapping table. A ``table``
node takes its dialect-specific name from the ``access_type`` value
("ALL" is a full table scan, "range" an index range scan, and so on).
The enclosing ``query_block`` is a transparent wrapper, not work the
engine performs: the top block's own attributes (select id, query cost)
become plan-wide properties, while an inner block's attach to the node
built from its contents. Numeric strings inside ``cost_info`` convert to
numbers.
"""

from __future__ import annotations

import json

from ..errors import ConversionError
from ..mapping import DialectMapping
from ..plan import Operation, PlanNode, Property, PropertyValue, UnifiedPlan
from ..textform import parse_scalar
from .common import mapped_property, unmapped_warning

FAMILY = "mysql"

# Keys whose value describes a child operation rather than an attribute.
_OPERATION_KEYS = (
    "ordering_operation",
    "grouping_operation",
    "duplicates_removal",
    "windowing",
    "buffer_result",
    "nested_loop",
    "union_result",
    "table",
    "materialized_from_subquery",
    "attached_subqueries",
    "optimized_away_subqueries",
    "query_block",
)


def _scalar(value: object) -> PropertyValue | type(None):
    """Flatten a JSON value to a property scalar, or None if impossible."""
    if value is None or isinstance(value, (str, int, float, bool)):
        if isinstance(value, str):
            return parse_scalar(value)
        return value
    if isinstance(value, list) and all(
        isinstance(item, (str, int, float, bool)) for item in value
    ):
        return ", ".join(str(item) for item in value)
    return None


def _cost_properties(
    cost_info: dict, mapping: DialectMapping, warnings: list[str]
) -> list[Property]:
    properties = []
    for key, value in cost_info.items():
        scalar = _scalar(value)
        if scalar is None and value is not None:
            warnings.append(f"mysql: skipped structured attribute {key!r}")
            continue
        properties.append(mapped_property(mapping, FAMILY, key, scalar, warnings))
    return properties


def _attribute_properties(
    obj: dict,
    skip: set[str],
    mapping: DialectMapping,
    warnings: list[str],
) -> list[Property]:
    properties = []
    for key, value in obj.items():
        if key in skip or key in _OPERATION_KEYS:
            continue
        if key == "cost_info" and isinstance(value, dict):
            properties.extend(_cost_properties(value, mapping, warnings))
            continue
        scalar = _scalar(value)
        if scalar is None and value is not None:
            warnings.append(f"mysql: skipped structured attribute {key!r}")
            continue
        properties.append(mapped_property(mapping, FAMILY, key, scalar, warnings))
    return properties


def _child_nodes(obj: dict, mapping: DialectMapping, plan: UnifiedPlan) -> list[PlanNode]:
    children: list[PlanNode] = []
    for key, value in obj.items():
        if key in _OPERATION_KEYS:
            children.extend(_operation_nodes(key, value, mapping, plan))
    return children


def _mapped_node(key: str, mapping: DialectMapping, plan: UnifiedPlan) -> PlanNode:
    category, identifier, hit = mapping.map_operation(FAMILY, key)
    if not hit:
        plan.warnings.append(unmapped_warning(FAMILY, "operation", key))
    return PlanNode(Operation(category, identifier))


def _table_node(obj: dict, mapping: DialectMapping, plan: UnifiedPlan) -> PlanNode:
    raw = obj.get("access_type")
    node = _mapped_node(str(raw) if isinstance(raw, str) else "table", mapping, plan)
    node.properties = _attribute_properties(obj, {"access_type"}, mapping, plan.warnings)
    node.children = _child_nodes(obj, mapping, plan)
    return node


def _operation_nodes(
    key: str, value: object, mapping: DialectMapping, plan: UnifiedPlan
) -> list[PlanNode]:
    if key == "query_block":
        if not isinstance(value, dict):
            return []
        node = _block_node(value, mapping, plan, top=False)
        return [node] if node is not None else []
    if key == "table":
        return [_table_node(value, mapping, plan)] if isinstance(value, dict) else []
    if key == "nested_loop":
        if not isinstance(value, list):
            return []
        node = _mapped_node(key, mapping, plan)
        for element in value:
            if isinstance(element, dict):
                node.children.extend(_child_nodes(element, mapping, plan))
        return [node]
    if key in ("attached_subqueries", "optimized_away_subqueries"):
        if not isinstance(value, list):
            return []
        nodes = []
        for element in value:
            if not isinstance(element, dict):
                continue
            node = _mapped_node(key, mapping, plan)
            node.properties = _attribute_properties(element, set(), mapping, plan.warnings)
            node.children = _child_nodes(element, mapping, plan)
            nodes.append(node)
        return nodes
    if key == "union_result":
        if not isinstance(value, dict):
            return []
        node = _mapped_node(key, mapping, plan)
        node.properties = _attribute_properties(
            value, {"query_specifications"}, mapping, plan.warnings
        )
        for spec in value.get("query_specifications", []) or []:
            if isinstance(spec, dict):
                node.children.extend(_child_nodes(spec, mapping, plan))
        return [node]
    # Generic wrapper operation (sort, group, distinct, window, buffer).
    if not isinstance(value, dict):
        return []
    node = _mapped_node(key, mapping, plan)
    node.properties = _attribute_properties(value, set(), mapping, plan.warnings)
    node.children = _child_nodes(value, mapping, plan)
    return [node]


def _block_node(
    block: dict, mapping: DialectMapping, plan: UnifiedPlan, top: bool
) -> PlanNode | None:
    properties = _attribute_properties(block, set(), mapping, plan.warnings)
    nodes = _child_nodes(block, mapping, plan)
    main: PlanNode | None = None
    if nodes:
        if len(nodes) > 1:
            plan.warnings.append("mysql: query block with several operations, kept the first")
        main = nodes[0]
    if top:
        plan.plan_properties.extend(properties)
    elif main is not None:
        main.properties.extend(properties)
    return main


def convert_mysql_json(text: str, mapping: DialectMapping) -> UnifiedPlan:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConversionError(f"unparseable input: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConversionError("expected a JSON object")
    plan = UnifiedPlan()
    block = doc.get("query_block")
    if not isinstance(block, dict):
        if any(key in doc for key in _OPERATION_KEYS):
            block = doc
        else:
            raise ConversionError("no query_block found")
    plan.root = _block_node(block, mapping, plan, top=True)
    if plan.root is None:
        plan.warnings.append("mysql: query block contains no operations")
    return plan
