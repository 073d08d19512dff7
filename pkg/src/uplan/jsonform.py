"""JSON serialization of unified plans.

The emitted document is compact (no whitespace), UTF-8, with a fixed key
order so equal plans always produce identical bytes:

    {"plan_properties": [Property...], "root": Node|null, "dialect": str?}
    Property = {"category": str, "identifier": str, "value": scalar}
    Node = {"operation": {"category": str, "identifier": str},
            "properties": [Property...], "children": [Node...]}

``dialect`` is present only when the plan carries one. Parsing tolerates
unknown keys at any level, recording one warning per ignored key and
dropping its value; unknown category strings are kept as-is so that
validate() can report them. Missing required keys and wrongly typed
values raise PlanSchemaError.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import PlanSchemaError, PlanValidationError
from .plan import (
    OPERATION_CATEGORY_NAMES,
    PROPERTY_CATEGORY_NAMES,
    Operation,
    PlanNode,
    Property,
    UnifiedPlan,
    validate,
)


def _category_text(category: object) -> str:
    if hasattr(category, "value"):
        return category.value  # type: ignore[union-attr]
    return str(category)


def _property_obj(prop: Property) -> dict[str, Any]:
    return {
        "category": _category_text(prop.category),
        "identifier": prop.identifier,
        "value": prop.value,
    }


def _node_obj(node: PlanNode) -> dict[str, Any]:
    return {
        "operation": {
            "category": _category_text(node.operation.category),
            "identifier": node.operation.identifier,
        },
        "properties": [_property_obj(p) for p in node.properties],
        "children": [_node_obj(c) for c in node.children],
    }


def serialize_json(plan: UnifiedPlan) -> str:
    """Render a valid plan as compact JSON with fixed key order."""
    violations = validate(plan)
    if violations:
        raise PlanValidationError(violations)
    doc: dict[str, Any] = {
        "plan_properties": [_property_obj(p) for p in plan.plan_properties],
        "root": _node_obj(plan.root) if plan.root is not None else None,
    }
    if plan.dialect is not None:
        doc["dialect"] = plan.dialect
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"), allow_nan=False)


_PROPERTY_KEYS = {"category", "identifier", "value"}
_NODE_KEYS = {"operation", "properties", "children"}
_OPERATION_KEYS = {"category", "identifier"}
_TOP_KEYS = {"plan_properties", "root", "dialect"}


def _require(obj: dict[str, Any], key: str, where: str) -> Any:
    if key not in obj:
        raise PlanSchemaError(f"missing required key {key} in {where}")
    return obj[key]


def _check_str(value: Any, what: str) -> str:
    if not isinstance(value, str):
        raise PlanSchemaError(f"{what} must be a string, got {type(value).__name__}")
    return value


def _warn_unknown(obj: dict[str, Any], known: set[str], where: str, warnings: list[str]) -> None:
    for key in obj:
        if key not in known:
            warnings.append(f"ignored unknown key {key!r} in {where}")


def _parse_property(obj: Any, where: str, warnings: list[str]) -> Property:
    if not isinstance(obj, dict):
        raise PlanSchemaError(f"{where} must be an object, got {type(obj).__name__}")
    _warn_unknown(obj, _PROPERTY_KEYS, where, warnings)
    category_name = _check_str(_require(obj, "category", where), f"{where} category")
    identifier = _check_str(_require(obj, "identifier", where), f"{where} identifier")
    value = _require(obj, "value", where)
    if value is not None and not isinstance(value, (str, bool, int, float)):
        raise PlanSchemaError(
            f"{where} value must be a scalar, got {type(value).__name__}"
        )
    category = PROPERTY_CATEGORY_NAMES.get(category_name, category_name)
    return Property(category, identifier, value)


def _parse_node(obj: Any, where: str, warnings: list[str]) -> PlanNode:
    if not isinstance(obj, dict):
        raise PlanSchemaError(f"{where} must be an object, got {type(obj).__name__}")
    _warn_unknown(obj, _NODE_KEYS, where, warnings)
    op_obj = _require(obj, "operation", where)
    if not isinstance(op_obj, dict):
        raise PlanSchemaError(f"{where} operation must be an object")
    _warn_unknown(op_obj, _OPERATION_KEYS, f"{where} operation", warnings)
    category_name = _check_str(
        _require(op_obj, "category", f"{where} operation"), f"{where} operation category"
    )
    identifier = _check_str(
        _require(op_obj, "identifier", f"{where} operation"),
        f"{where} operation identifier",
    )
    category = OPERATION_CATEGORY_NAMES.get(category_name, category_name)
    node = PlanNode(Operation(category, identifier))

    props = _require(obj, "properties", where)
    if not isinstance(props, list):
        raise PlanSchemaError(f"{where} properties must be an array")
    for position, item in enumerate(props):
        node.properties.append(
            _parse_property(item, f"{where} property {position}", warnings)
        )

    children = _require(obj, "children", where)
    if not isinstance(children, list):
        raise PlanSchemaError(f"{where} children must be an array")
    for position, item in enumerate(children):
        node.children.append(_parse_node(item, f"{where} child {position}", warnings))
    return node


def parse_unified_json(text: str) -> UnifiedPlan:
    """Parse the JSON form back into a plan.

    Unknown keys anywhere are ignored with one warning each (recorded on
    the returned plan), keeping old readers usable on extended documents.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanSchemaError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise PlanSchemaError(
            f"top-level value must be an object, got {type(doc).__name__}"
        )
    warnings: list[str] = []
    _warn_unknown(doc, _TOP_KEYS, "top-level object", warnings)
    if "plan_properties" not in doc:
        raise PlanSchemaError("missing required key plan_properties")
    props = doc["plan_properties"]
    if not isinstance(props, list):
        raise PlanSchemaError("plan_properties must be an array")
    plan = UnifiedPlan()
    for position, item in enumerate(props):
        plan.plan_properties.append(
            _parse_property(item, f"plan property {position}", warnings)
        )
    root = doc.get("root")
    if root is not None:
        plan.root = _parse_node(root, "root", warnings)
    dialect = doc.get("dialect")
    if dialect is not None:
        plan.dialect = _check_str(dialect, "dialect")
    plan.warnings = warnings
    return plan
