"""Plan-level algorithms: fingerprinting, novelty tracking, cardinality
checks, category metrics, cross-plan diffing, and timing arithmetic.

The fingerprint deliberately forgets unstable data (estimates, costs,
runtime status, generated identifiers inside predicate strings) so that
two runs of the same query hash identically while any structural change
does not.
"""

from __future__ import annotations

import hashlib
import re
import statistics
from collections import Counter
from dataclasses import dataclass, field

from .errors import CardinalityError, InconclusiveComparisonError, PlanValidationError
from .plan import (
    OperationCategory,
    PlanNode,
    Property,
    PropertyCategory,
    UnifiedPlan,
    iter_nodes,
    validate,
)
from .textform import serialize_text

SCRUB_TOKEN = "⟨ID⟩"

_DEFAULT_EXCLUDED = frozenset(
    {
        PropertyCategory.CARDINALITY,
        PropertyCategory.COST,
        PropertyCategory.STATUS,
    }
)


@dataclass(frozen=True)
class FingerprintPolicy:
    """What to ignore when deciding whether two plans are the same."""

    excluded_property_categories: frozenset = _DEFAULT_EXCLUDED
    excluded_configuration_identifiers: frozenset = frozenset()
    value_scrub_patterns: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self,
            "excluded_property_categories",
            frozenset(self.excluded_property_categories),
        )
        object.__setattr__(
            self,
            "excluded_configuration_identifiers",
            frozenset(self.excluded_configuration_identifiers),
        )
        object.__setattr__(
            self, "value_scrub_patterns", tuple(self.value_scrub_patterns)
        )


#: Policy that ignores nothing; the digest covers every property.
EXACT_POLICY = FingerprintPolicy(
    excluded_property_categories=frozenset(),
    excluded_configuration_identifiers=frozenset(),
    value_scrub_patterns=(),
)


@dataclass(frozen=True)
class PlanFingerprint:
    digest: str
    canonical_form: str


def _keep(prop: Property, policy: FingerprintPolicy) -> bool:
    if prop.category in policy.excluded_property_categories:
        return False
    if (
        prop.category is PropertyCategory.CONFIGURATION
        and prop.identifier in policy.excluded_configuration_identifiers
    ):
        return False
    return True


def _scrubbed(prop: Property, patterns: list[re.Pattern]) -> Property:
    if (
        patterns
        and prop.category is PropertyCategory.CONFIGURATION
        and isinstance(prop.value, str)
    ):
        value = prop.value
        for pattern in patterns:
            value = pattern.sub(SCRUB_TOKEN, value)
        if value != prop.value:
            return Property(prop.category, prop.identifier, value)
    return prop


def prune(plan: UnifiedPlan, policy: FingerprintPolicy) -> UnifiedPlan:
    """Copy of the plan without the properties the policy excludes."""
    patterns = [re.compile(p) for p in policy.value_scrub_patterns]

    def props(properties: list[Property]) -> list[Property]:
        return [_scrubbed(p, patterns) for p in properties if _keep(p, policy)]

    def node(n: PlanNode) -> PlanNode:
        return PlanNode(n.operation, props(n.properties), [node(c) for c in n.children])

    return UnifiedPlan(
        root=node(plan.root) if plan.root is not None else None,
        plan_properties=props(plan.plan_properties),
        dialect=plan.dialect,
    )


def fingerprint(plan: UnifiedPlan, policy: FingerprintPolicy | None = None) -> PlanFingerprint:
    violations = validate(plan)
    if violations:
        raise PlanValidationError(violations)
    if policy is None:
        policy = FingerprintPolicy()
    canonical = serialize_text(prune(plan, policy), style="canonical")
    digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
    return PlanFingerprint(digest=digest, canonical_form=canonical)


@dataclass
class NoveltyTracker:
    """Counts how long it has been since a structurally new plan showed up.

    `observe` answers two questions per step: is this plan new, and has
    the stream been stale long enough that the caller should perturb its
    test state. The staleness counter restarts both on novelty and after
    each mutation signal, so the signal fires at most once per window.
    """

    mutation_threshold: int
    seen: set = field(default_factory=set)
    queries_since_novel: int = 0

    def __post_init__(self):
        if self.mutation_threshold < 1:
            raise ValueError("mutation_threshold must be a positive integer")

    def observe(self, fp: PlanFingerprint | str) -> tuple[bool, bool]:
        digest = fp.digest if isinstance(fp, PlanFingerprint) else str(fp)
        novel = digest not in self.seen
        self.seen.add(digest)
        if novel:
            self.queries_since_novel = 0
        else:
            self.queries_since_novel += 1
        should_mutate = self.queries_since_novel >= self.mutation_threshold
        if should_mutate:
            self.queries_since_novel = 0
        return novel, should_mutate


def root_cardinality(plan: UnifiedPlan):
    """The root's estimated row count, or None when the dialect has none."""
    if plan.root is None:
        return None
    for prop in plan.root.properties:
        if (
            prop.category is PropertyCategory.CARDINALITY
            and prop.identifier == "estimated_rows"
        ):
            if isinstance(prop.value, bool) or not isinstance(prop.value, (int, float)):
                raise CardinalityError(
                    f"estimated_rows has non-numeric value {prop.value!r}"
                )
            return prop.value
    return None


@dataclass(frozen=True)
class CertVerdict:
    base_rows: float
    restricted_rows: float
    violation: bool
    ratio: float | None


def cert_check(
    base: UnifiedPlan, restricted: UnifiedPlan, tolerance: float = 0.0
) -> CertVerdict:
    """Flag the restricted query estimating more rows than its base.

    A query that only filters the base's result can never return more
    rows, so a strictly larger estimate points at the optimizer.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    base_rows = root_cardinality(base)
    if base_rows is None:
        raise InconclusiveComparisonError("base plan has no root estimated_rows")
    restricted_rows = root_cardinality(restricted)
    if restricted_rows is None:
        raise InconclusiveComparisonError("restricted plan has no root estimated_rows")
    violation = restricted_rows > base_rows * (1 + tolerance)
    ratio = restricted_rows / base_rows if base_rows > 0 else None
    return CertVerdict(
        base_rows=base_rows,
        restricted_rows=restricted_rows,
        violation=violation,
        ratio=ratio,
    )


@dataclass(frozen=True)
class CategoryMetrics:
    counts: dict

    def __post_init__(self):
        full = {category: 0 for category in OperationCategory}
        full.update(self.counts)
        object.__setattr__(self, "counts", full)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def category_counts(plan: UnifiedPlan) -> CategoryMetrics:
    counts = Counter()
    for node in iter_nodes(plan):
        if isinstance(node.operation.category, OperationCategory):
            counts[node.operation.category] += 1
    return CategoryMetrics(counts=dict(counts))


def producer_variance(metrics: list) -> float:
    """Population variance of Producer counts across plans.

    Accepts CategoryMetrics entries or bare numbers.
    """
    if not metrics:
        raise ValueError("need at least one metrics entry")
    values = [
        float(m.counts[OperationCategory.PRODUCER])
        if isinstance(m, CategoryMetrics)
        else float(m)
        for m in metrics
    ]
    return statistics.pvariance(values)


def _operation_label(node: PlanNode) -> str:
    category = node.operation.category
    name = category.value if isinstance(category, OperationCategory) else str(category)
    return f"{name}->{node.operation.identifier}"


def _producer_objects(plan: UnifiedPlan) -> Counter:
    objects = Counter()
    for node in iter_nodes(plan):
        if node.operation.category is not OperationCategory.PRODUCER:
            continue
        for prop in node.properties:
            if prop.identifier == "name_object":
                objects[str(prop.value)] += 1
    return objects


@dataclass(frozen=True)
class DiffReport:
    category_deltas: dict
    operation_surplus_a: list
    operation_surplus_b: list
    producer_objects_a: dict
    producer_objects_b: dict

    @property
    def is_empty(self) -> bool:
        return (
            not self.category_deltas
            and not self.operation_surplus_a
            and not self.operation_surplus_b
            and self.producer_objects_a == self.producer_objects_b
        )

    def to_json_dict(self) -> dict:
        return {
            "category_deltas": {
                category.value: delta
                for category, delta in sorted(
                    self.category_deltas.items(), key=lambda kv: kv[0].value
                )
            },
            "operation_surplus_a": list(self.operation_surplus_a),
            "operation_surplus_b": list(self.operation_surplus_b),
            "producer_objects_a": dict(sorted(self.producer_objects_a.items())),
            "producer_objects_b": dict(sorted(self.producer_objects_b.items())),
        }


def diff(a: UnifiedPlan, b: UnifiedPlan) -> DiffReport:
    for name, plan in (("a", a), ("b", b)):
        violations = validate(plan)
        if violations:
            raise PlanValidationError([f"plan {name}: {v}" for v in violations])
    counts_a = category_counts(a).counts
    counts_b = category_counts(b).counts
    deltas = {
        category: counts_a[category] - counts_b[category]
        for category in OperationCategory
        if counts_a[category] != counts_b[category]
    }
    ops_a = Counter(_operation_label(n) for n in iter_nodes(a))
    ops_b = Counter(_operation_label(n) for n in iter_nodes(b))
    surplus_a = sorted((ops_a - ops_b).elements())
    surplus_b = sorted((ops_b - ops_a).elements())
    return DiffReport(
        category_deltas=deltas,
        operation_surplus_a=surplus_a,
        operation_surplus_b=surplus_b,
        producer_objects_a=dict(_producer_objects(a)),
        producer_objects_b=dict(_producer_objects(b)),
    )


def scan_time_share(node_times, removed) -> float:
    """Fraction of total runtime attributed to the removed labels.

    `node_times` pairs labels with milliseconds and must include a
    ("TOTAL", ms) entry for the whole query.
    """
    pairs = node_times.items() if isinstance(node_times, dict) else node_times
    times = {}
    for label, ms in pairs:
        if label in times:
            raise ValueError(f"duplicate label {label!r}")
        times[label] = float(ms)
    if "TOTAL" not in times:
        raise ValueError("missing TOTAL entry")
    total = times["TOTAL"]
    if total <= 0:
        raise ValueError("TOTAL must be positive")
    removed_sum = 0.0
    for label in removed:
        if label not in times:
            raise ValueError(f"unknown label {label!r}")
        removed_sum += times[label]
    return removed_sum / total


__all__ = [
    "SCRUB_TOKEN",
    "EXACT_POLICY",
    "FingerprintPolicy",
    "PlanFingerprint",
    "NoveltyTracker",
    "CertVerdict",
    "CategoryMetrics",
    "DiffReport",
    "prune",
    "fingerprint",
    "root_cardinality",
    "cert_check",
    "category_counts",
    "producer_variance",
    "diff",
    "scan_time_share",
]
