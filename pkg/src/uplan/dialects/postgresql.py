"""Readers for PostgreSQL EXPLAIN output, text and JSON formats.

The text reader recovers the tree from indentation: a node line starts
with ``->`` (the root line has none), and a node at indentation depth d
becomes a child of the nearest preceding node at a smaller depth.
Attribute lines indented under a node attach to it; unindented trailing
``Key: value`` lines (such as planning time) become plan-wide properties.
Parenthesized groups carry cost/row estimates; a trailing ``...`` left by
a display that truncated the line is tolerated, keeping whatever
attributes survived.
"""

from __future__ import annotations

import json
import re

from ..errors import ConversionError
from ..mapping import DialectMapping
from ..plan import (
    Operation,
    PlanNode,
    Property,
    PropertyCategory,
    UnifiedPlan,
)
from ..textform import parse_scalar
from .common import coerce_value, mapped_property, unmapped_warning

FAMILY = "postgresql"

_ARROW_RE = re.compile(r"^(\s*)->\s*(.*)$")
_COST_PAIR_RE = re.compile(r"^(\d+(?:\.\d+)?)\.\.(\d+(?:\.\d+)?)$")
_USING_ON_RE = re.compile(r"^(?P<op>.+?)\s+using\s+(?P<index>\S+)\s+on\s+(?P<obj>\S+)(?:\s+(?P<alias>\S+))?$")
_ON_RE = re.compile(r"^(?P<op>.+?)\s+on\s+(?P<obj>\S+)(?:\s+(?P<alias>\S+))?$")
_ATTR_TOKEN_RE = re.compile(r"(\w+)=(\S+)")

# Tree-shaped EXPLAIN sections that do not convert to plan properties.
_IGNORED_TOP_KEYS = {"Triggers", "Planning", "Settings", "JIT", "Query Text"}


def parse_cost(text: str) -> tuple[float, float]:
    """Parse a ``cost=<start>..<total>`` literal into its two numbers."""
    match = re.match(r"^\s*cost=(\d+(?:\.\d+)?)\.\.(\d+(?:\.\d+)?)\s*$", text)
    if not match:
        raise ConversionError(f"malformed cost literal {text!r}")
    return float(match.group(1)), float(match.group(2))


def _attr_group_properties(
    content: str, mapping: DialectMapping, warnings: list[str]
) -> list[Property]:
    """Properties from one parenthesized attribute group."""
    if content.endswith("..."):
        content = content[:-3]
    properties: list[Property] = []
    tokens = content.split()
    if tokens == ["never", "executed"]:
        return [Property(PropertyCategory.STATUS, "never_executed", True)]
    runtime = bool(tokens) and tokens[0] == "actual"
    if runtime:
        tokens = tokens[1:]
    for token in tokens:
        match = _ATTR_TOKEN_RE.match(token)
        if not match:
            continue
        key, raw_value = match.group(1), match.group(2)
        pair = _COST_PAIR_RE.match(raw_value)
        if key == "cost":
            if pair:
                properties.append(Property(PropertyCategory.COST, "cost_start", float(pair.group(1))))
                properties.append(Property(PropertyCategory.COST, "cost_total", float(pair.group(2))))
            else:
                single = raw_value.rstrip(".")
                if re.fullmatch(r"\d+(\.\d+)?", single):
                    properties.append(Property(PropertyCategory.COST, "cost_start", float(single)))
            continue
        if runtime and key == "time" and pair:
            properties.append(Property(PropertyCategory.STATUS, "actual_time_start_ms", float(pair.group(1))))
            properties.append(Property(PropertyCategory.STATUS, "actual_time_total_ms", float(pair.group(2))))
            continue
        if runtime:
            raw_name = {"rows": "Actual Rows", "loops": "Actual Loops"}.get(key)
            if raw_name is None:
                continue
            properties.append(mapped_property(mapping, FAMILY, raw_name, parse_scalar(raw_value), warnings))
            continue
        properties.append(mapped_property(mapping, FAMILY, key, parse_scalar(raw_value), warnings))
    return properties


def _parse_node_line(
    content: str, mapping: DialectMapping, warnings: list[str]
) -> PlanNode:
    groups = [m.group(1) for m in re.finditer(r"\(([^()]*)\)", content)]
    head = content.split(" (", 1)[0].strip()

    properties: list[Property] = []
    if head.startswith("Parallel "):
        head = head[len("Parallel "):]
        properties.append(Property(PropertyCategory.STATUS, "parallel", True))
    for prefix in ("Partial ", "Finalize "):
        if head.startswith(prefix):
            head = head[len(prefix):]
            properties.append(
                Property(PropertyCategory.CONFIGURATION, "partial_mode", prefix.strip())
            )
            break

    index_name = object_name = alias = None
    match = _USING_ON_RE.match(head)
    if match:
        head = match.group("op")
        index_name, object_name, alias = match.group("index"), match.group("obj"), match.group("alias")
    else:
        match = _ON_RE.match(head)
        if match:
            head = match.group("op")
            object_name, alias = match.group("obj"), match.group("alias")

    category, identifier, hit = mapping.map_operation(FAMILY, head)
    if not hit:
        warnings.append(unmapped_warning(FAMILY, "operation", head))
    if index_name:
        properties.append(Property(PropertyCategory.CONFIGURATION, "name_index", index_name))
    if object_name:
        properties.append(Property(PropertyCategory.CONFIGURATION, "name_object", object_name))
    if alias and alias != object_name:
        properties.append(Property(PropertyCategory.CONFIGURATION, "name_alias", alias))
    for group in groups:
        properties.extend(_attr_group_properties(group, mapping, warnings))
    return PlanNode(Operation(category, identifier), properties)


def _skippable(stripped: str) -> bool:
    if stripped in ("", "QUERY PLAN"):
        return True
    if set(stripped) <= {"-"}:
        return True
    return bool(re.fullmatch(r"\(\d+ rows?\)", stripped))


def convert_postgresql_text(text: str, mapping: DialectMapping) -> UnifiedPlan:
    plan = UnifiedPlan()
    # (node, depth) from root to the current branch tip; root sits at
    # depth -1 so every arrow node (column >= 0) nests under it.
    stack: list[tuple[PlanNode, int]] = []
    current: PlanNode | None = None
    for line in text.splitlines():
        stripped = line.strip()
        if _skippable(stripped):
            continue
        arrow = _ARROW_RE.match(line)
        if arrow:
            depth = len(arrow.group(1))
            node = _parse_node_line(arrow.group(2).strip(), mapping, plan.warnings)
            while stack and stack[-1][1] >= depth:
                stack.pop()
            if stack:
                stack[-1][0].children.append(node)
            elif plan.root is None:
                plan.root = node
            else:
                raise ConversionError(f"node line {stripped!r} has no parent")
            stack.append((node, depth))
            current = node
            continue
        if plan.root is None:
            node = _parse_node_line(stripped, mapping, plan.warnings)
            plan.root = node
            stack.append((node, -1))
            current = node
            continue
        indent = len(line) - len(line.lstrip(" "))
        if ": " not in stripped and not stripped.endswith(":"):
            plan.warnings.append(f"postgresql: ignored line {stripped!r}")
            continue
        key, _, raw_value = stripped.partition(":")
        prop = mapped_property(
            mapping, FAMILY, key.strip(), parse_scalar(raw_value.strip()), plan.warnings
        )
        if indent == 0:
            plan.plan_properties.append(prop)
        elif current is not None:
            current.properties.append(prop)
    return plan


def _json_value_property(
    key: str, value: object, mapping: DialectMapping, warnings: list[str]
) -> Property | None:
    if isinstance(value, list):
        if all(isinstance(item, (str, int, float, bool)) for item in value):
            value = ", ".join(str(item) for item in value)
        else:
            warnings.append(f"postgresql: skipped structured attribute {key!r}")
            return None
    elif value is not None and not isinstance(value, (str, int, float, bool)):
        warnings.append(f"postgresql: skipped structured attribute {key!r}")
        return None
    return mapped_property(mapping, FAMILY, key, value, warnings)


def _node_from_json(obj: dict, mapping: DialectMapping, warnings: list[str]) -> PlanNode:
    if "Node Type" not in obj:
        raise ConversionError("plan node object is missing 'Node Type'")
    raw = obj["Node Type"]
    if raw == "ModifyTable" and isinstance(obj.get("Operation"), str):
        raw = obj["Operation"]
    category, identifier, hit = mapping.map_operation(FAMILY, str(raw))
    if not hit:
        warnings.append(unmapped_warning(FAMILY, "operation", str(raw)))
    node = PlanNode(Operation(category, identifier))
    for key, value in obj.items():
        if key in ("Node Type", "Plans", "Operation"):
            continue
        prop = _json_value_property(key, value, mapping, warnings)
        if prop is not None:
            node.properties.append(prop)
    for child in obj.get("Plans", []) or []:
        if isinstance(child, dict):
            node.children.append(_node_from_json(child, mapping, warnings))
    return node


def convert_postgresql_json(text: str, mapping: DialectMapping) -> UnifiedPlan:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConversionError(f"unparseable input: {exc}") from exc
    if isinstance(doc, list):
        if not doc:
            plan = UnifiedPlan()
            plan.warnings.append("postgresql: empty plan document")
            return plan
        doc = doc[0]
    if not isinstance(doc, dict):
        raise ConversionError("expected a JSON object or array of objects")
    plan = UnifiedPlan()
    for key, value in doc.items():
        if key == "Plan":
            continue
        if key in _IGNORED_TOP_KEYS:
            continue
        prop = _json_value_property(key, value, mapping, plan.warnings)
        if prop is not None:
            plan.plan_properties.append(prop)
    top = doc.get("Plan")
    if isinstance(top, dict):
        plan.root = _node_from_json(top, mapping, plan.warnings)
    else:
        plan.warnings.append("postgresql: document has no 'Plan' object")
    return plan
