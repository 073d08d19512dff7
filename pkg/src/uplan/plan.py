"""Core model for unified query plans.

A plan is an optional tree of operation nodes plus a list of plan-wide
properties. Every operation and every property carries a category from a
small closed taxonomy, an identifier, and (for properties) a scalar value.
Identifiers follow a keyword grammar: an ASCII letter followed by ASCII
letters, digits, or underscores. Names that arrive with spaces or hyphens
are stored with those characters replaced by underscores; display-oriented
output restores the spaces.

Instances are plain dataclasses. Treat them as immutable after
construction: nothing in this package mutates a plan it did not build, so
values can be shared freely across threads.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Iterator, Union


class OperationCategory(enum.Enum):
    """What kind of work an operation performs.

    PRODUCER retrieves data from storage or returns constants. COMBINATOR
    changes the combination or permutation of tuples without changing
    their attributes. JOIN merges multiple tuple streams on a condition.
    FOLDER reduces groups of tuples to aggregate values. EXECUTOR covers
    engine-internal work that leaves data unchanged (gathering parallel
    workers, materializing, building hash tables). PROJECTOR changes the
    attributes of tuples. CONSUMER sends data out of the query (DML
    targets, result sinks).
    """

    PRODUCER = "Producer"
    COMBINATOR = "Combinator"
    JOIN = "Join"
    FOLDER = "Folder"
    EXECUTOR = "Executor"
    PROJECTOR = "Projector"
    CONSUMER = "Consumer"


class PropertyCategory(enum.Enum):
    """What a property describes.

    CARDINALITY: data volume estimates (row counts, widths). COST:
    optimizer cost estimates. CONFIGURATION: what the operation does
    (conditions, keys, object names). STATUS: runtime state (timings,
    worker counts, memory).
    """

    CARDINALITY = "Cardinality"
    COST = "Cost"
    CONFIGURATION = "Configuration"
    STATUS = "Status"


OPERATION_CATEGORY_NAMES = {c.value: c for c in OperationCategory}
PROPERTY_CATEGORY_NAMES = {c.value: c for c in PropertyCategory}

# Scalar property values: string, number, boolean, or null. Integers are
# preserved as integers whenever the source was lossless.
PropertyValue = Union[str, int, float, bool, None]

_KEYWORD_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def canonical_keyword(raw: str) -> str:
    """Normalize a raw name into keyword form.

    Runs of spaces and hyphens become a single underscore; surrounding
    whitespace is dropped. The result is not guaranteed valid (other
    illegal characters are kept so that validation can report them).
    """
    return re.sub(r"[ \-]+", "_", raw.strip())


def is_valid_keyword(text: str) -> bool:
    """True if *text* satisfies the keyword grammar."""
    return bool(_KEYWORD_RE.match(text))


def keyword_violation(text: str) -> str | None:
    """Describe why *text* is not a valid keyword, or None if it is."""
    if not text:
        return "identifier must not be empty"
    if not (text[0].isascii() and text[0].isalpha()):
        return f"identifier {text!r} must start with a letter"
    if not _KEYWORD_RE.match(text):
        bad = sorted({ch for ch in text if not re.match(r"[A-Za-z0-9_]", ch)})
        return f"identifier {text!r} contains invalid characters: {bad}"
    return None


def display_keyword(text: str) -> str:
    """Display form of a keyword: underscores shown as spaces."""
    return text.replace("_", " ")


@dataclass
class Property:
    """One named, categorized scalar attached to a node or a plan.

    The category is normally a PropertyCategory member; deserializing a
    hand-edited file can leave an unknown category behind as a raw
    string, which validate() reports.
    """

    category: PropertyCategory | str
    identifier: str
    value: PropertyValue = None


@dataclass
class Operation:
    """The categorized, dialect-neutral name of one plan node."""

    category: OperationCategory | str
    identifier: str


@dataclass
class PlanNode:
    """One node of a plan tree: an operation, its properties, its children.

    Property order and child order are both meaningful and preserved.
    """

    operation: Operation
    properties: list[Property] = field(default_factory=list)
    children: list[PlanNode] = field(default_factory=list)


@dataclass
class UnifiedPlan:
    """A complete plan: optional root tree plus plan-wide properties.

    ``dialect`` and ``warnings`` are conversion metadata. They never take
    part in equality, fingerprints, or serialization of the plan body.
    """

    root: PlanNode | None = None
    plan_properties: list[Property] = field(default_factory=list)
    dialect: str | None = field(default=None, compare=False)
    warnings: list[str] = field(default_factory=list, compare=False)


def iter_nodes(plan: UnifiedPlan) -> Iterator[PlanNode]:
    """Yield every node of the plan tree in pre-order."""
    if plan.root is None:
        return
    stack = [plan.root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def _category_name(category: object) -> str:
    if isinstance(category, (OperationCategory, PropertyCategory)):
        return category.value
    return str(category)


def _check_property(prop: Property, where: str, out: list[str]) -> None:
    if not isinstance(prop.category, PropertyCategory):
        out.append(f"{where}: unknown property category {prop.category!r}")
    bad = keyword_violation(prop.identifier)
    if bad is not None:
        out.append(f"{where}: property {bad}")
    value = prop.value
    if value is None or isinstance(value, (str, bool, int)):
        return
    if isinstance(value, float):
        if not math.isfinite(value):
            out.append(f"{where}: property {prop.identifier!r} has non-finite number")
        return
    out.append(
        f"{where}: property {prop.identifier!r} has unsupported value type "
        f"{type(value).__name__}"
    )


def validate(plan: UnifiedPlan) -> list[str]:
    """Return one violation message per grammar breach; empty when valid.

    Catches bad keyword characters, unknown category values injected by
    deserialization of hand-edited files, unsupported property value
    types, and node sharing within the tree.
    """
    violations: list[str] = []
    for position, prop in enumerate(plan.plan_properties):
        _check_property(prop, f"plan property {position}", violations)
    if plan.root is None:
        return violations

    seen: set[int] = set()
    index = 0
    stack = [plan.root]
    while stack:
        node = stack.pop()
        where = f"node {index}"
        index += 1
        if id(node) in seen:
            violations.append(f"{where}: node appears more than once in the tree")
            continue
        seen.add(id(node))
        op = node.operation
        if not isinstance(op.category, OperationCategory):
            violations.append(f"{where}: unknown operation category {op.category!r}")
        bad = keyword_violation(op.identifier)
        if bad is not None:
            violations.append(f"{where}: operation {bad}")
        for prop in node.properties:
            _check_property(prop, where, violations)
        stack.extend(reversed(node.children))
    return violations


def _values_equal(a: PropertyValue, b: PropertyValue) -> bool:
    # Type-strict: 1 != 1.0 and True != 1, so equal plans always
    # serialize to identical bytes.
    if type(a) is not type(b):
        return False
    return a == b


def _properties_equal(a: list[Property], b: list[Property]) -> bool:
    if len(a) != len(b):
        return False
    for pa, pb in zip(a, b):
        if pa.category != pb.category or pa.identifier != pb.identifier:
            return False
        if not _values_equal(pa.value, pb.value):
            return False
    return True


def _nodes_equal(a: PlanNode, b: PlanNode) -> bool:
    if a.operation.category != b.operation.category:
        return False
    if a.operation.identifier != b.operation.identifier:
        return False
    if not _properties_equal(a.properties, b.properties):
        return False
    if len(a.children) != len(b.children):
        return False
    return all(_nodes_equal(ca, cb) for ca, cb in zip(a.children, b.children))


def equals_structural(a: UnifiedPlan, b: UnifiedPlan) -> bool:
    """Structural equality: tree shape, operations, ordered properties.

    Ignores dialect tags and warnings. Property values compare
    type-strictly (1 and 1.0 differ), matching serialized bytes.
    """
    if (a.root is None) != (b.root is None):
        return False
    if not _properties_equal(a.plan_properties, b.plan_properties):
        return False
    if a.root is not None and b.root is not None:
        return _nodes_equal(a.root, b.root)
    return True
