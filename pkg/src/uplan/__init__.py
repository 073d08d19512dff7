"""uplan: one representation for query plans from several DBMSs.

Parse EXPLAIN output (PostgreSQL, MySQL, TiDB, SQLite) into a single
tree model, serialize it as text or JSON, fingerprint it, compare
cardinalities and structure across engines, and render it as DOT or HTML.
"""

from .analysis import (
    EXACT_POLICY,
    SCRUB_TOKEN,
    CategoryMetrics,
    CertVerdict,
    DiffReport,
    FingerprintPolicy,
    NoveltyTracker,
    PlanFingerprint,
    category_counts,
    cert_check,
    diff,
    fingerprint,
    producer_variance,
    prune,
    root_cardinality,
    scan_time_share,
)
from .dialects import Dialect, convert
from .errors import (
    CardinalityError,
    ConversionError,
    InconclusiveComparisonError,
    MappingError,
    PlanError,
    PlanSchemaError,
    PlanSyntaxError,
    PlanValidationError,
)
from .jsonform import parse_unified_json, serialize_json
from .mapping import DialectMapping, MappingEntry, default_mapping, load_mapping
from .plan import (
    Operation,
    OperationCategory,
    PlanNode,
    Property,
    PropertyCategory,
    UnifiedPlan,
    canonical_keyword,
    display_keyword,
    equals_structural,
    is_valid_keyword,
    iter_nodes,
    validate,
)
from .render import RenderOptions, to_dot, to_html
from .textform import parse_unified_text, serialize_text

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CardinalityError",
    "CategoryMetrics",
    "CertVerdict",
    "ConversionError",
    "Dialect",
    "DialectMapping",
    "DiffReport",
    "EXACT_POLICY",
    "FingerprintPolicy",
    "InconclusiveComparisonError",
    "MappingEntry",
    "MappingError",
    "NoveltyTracker",
    "Operation",
    "OperationCategory",
    "PlanError",
    "PlanFingerprint",
    "PlanNode",
    "PlanSchemaError",
    "PlanSyntaxError",
    "PlanValidationError",
    "Property",
    "PropertyCategory",
    "RenderOptions",
    "SCRUB_TOKEN",
    "UnifiedPlan",
    "canonical_keyword",
    "category_counts",
    "cert_check",
    "convert",
    "default_mapping",
    "diff",
    "display_keyword",
    "equals_structural",
    "fingerprint",
    "is_valid_keyword",
    "iter_nodes",
    "load_mapping",
    "parse_unified_json",
    "parse_unified_text",
    "producer_variance",
    "prune",
    "root_cardinality",
    "scan_time_share",
    "serialize_json",
    "serialize_text",
    "to_dot",
    "to_html",
    "validate",
]
