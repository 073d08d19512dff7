"""Command-line interface.

Subcommands: convert, fingerprint, cert, metrics, diff, render.
Standard output carries only the requested artifact; every diagnostic
goes to standard error. Exit codes: 0 success, 1 file I/O failure,
2 bad input or usage, 3 cardinality violation from `cert`.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .analysis import (
    EXACT_POLICY,
    FingerprintPolicy,
    category_counts,
    cert_check,
    diff,
    fingerprint,
    producer_variance,
)
from .dialects import Dialect, convert
from .errors import InconclusiveComparisonError, PlanError
from .jsonform import parse_unified_json, serialize_json
from .mapping import DialectMapping, default_mapping, load_mapping
from .plan import PROPERTY_CATEGORY_NAMES, OperationCategory, UnifiedPlan
from .render import RenderOptions, to_dot, to_html
from .textform import parse_unified_text, serialize_text


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _emit_warnings(warnings: list[str]) -> None:
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)


def _load_mapping(args) -> DialectMapping:
    path = getattr(args, "mapping", None) or os.environ.get("UPLAN_MAPPING")
    if not path:
        return default_mapping()
    return load_mapping(Path(path).read_text(encoding="utf-8"))


def _load_plan(path: str) -> UnifiedPlan:
    """Read a unified plan, sniffing JSON versus text form."""
    text = _read_input(path)
    try:
        if text.lstrip().startswith("{"):
            plan = parse_unified_json(text)
        else:
            plan = parse_unified_text(text)
    except PlanError as exc:
        raise PlanError(f"{path}: {exc}") from exc
    _emit_warnings(plan.warnings)
    return plan


def _load_policy(spec: str | None) -> FingerprintPolicy | None:
    if spec is None:
        return None
    if spec == "none":
        return EXACT_POLICY
    data = json.loads(Path(spec).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError("policy file must hold a JSON object")
    known = {
        "excluded_property_categories",
        "excluded_configuration_identifiers",
        "value_scrub_patterns",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown policy key {sorted(unknown)[0]!r}")
    categories = []
    for name in data.get("excluded_property_categories", []):
        if name not in PROPERTY_CATEGORY_NAMES:
            raise ValueError(f"unknown property category {name!r} in policy")
        categories.append(PROPERTY_CATEGORY_NAMES[name])
    return FingerprintPolicy(
        excluded_property_categories=frozenset(categories),
        excluded_configuration_identifiers=frozenset(
            data.get("excluded_configuration_identifiers", [])
        ),
        value_scrub_patterns=tuple(data.get("value_scrub_patterns", [])),
    )


def cmd_convert(args) -> int:
    mapping = _load_mapping(args)
    text = _read_input(args.path)
    plan = convert(Dialect(args.dialect), text, mapping)
    _emit_warnings(plan.warnings)
    if args.format == "json":
        print(serialize_json(plan))
    else:
        style = "canonical" if args.format == "text" else "pretty"
        print(serialize_text(plan, style=style))
    return 0


def cmd_fingerprint(args) -> int:
    policy = _load_policy(args.policy)
    paths = args.paths or ["-"]
    lines = []
    for path in paths:
        plan = _load_plan(path)
        fp = fingerprint(plan, policy)
        lines.append(f"{fp.digest}  {path}")
    print("\n".join(lines))
    return 0


def cmd_cert(args) -> int:
    base = _load_plan(args.base)
    restricted = _load_plan(args.restricted)
    try:
        verdict = cert_check(base, restricted, tolerance=args.tolerance)
    except InconclusiveComparisonError as exc:
        print(f"error: inconclusive: {exc}", file=sys.stderr)
        return 2
    print(
        json.dumps(
            {
                "base_rows": verdict.base_rows,
                "restricted_rows": verdict.restricted_rows,
                "violation": verdict.violation,
                "ratio": verdict.ratio,
            }
        )
    )
    return 3 if verdict.violation else 0


_CATEGORY_ORDER = list(OperationCategory)


def cmd_metrics(args) -> int:
    rows = []
    for path in args.paths:
        plan = _load_plan(path)
        rows.append((path, category_counts(plan)))
    header = ["plan"] + [c.value for c in _CATEGORY_ORDER] + ["total"]
    lines = ["\t".join(header)]
    for path, metrics in rows:
        cells = [path]
        cells += [str(metrics.counts[c]) for c in _CATEGORY_ORDER]
        cells.append(str(metrics.total))
        lines.append("\t".join(cells))
    count = len(rows)
    means = [
        sum(metrics.counts[c] for _, metrics in rows) / count for c in _CATEGORY_ORDER
    ]
    mean_cells = ["mean"] + [f"{m:g}" for m in means]
    mean_cells.append(f"{sum(metrics.total for _, metrics in rows) / count:g}")
    lines.append("\t".join(mean_cells))
    variance = producer_variance([metrics for _, metrics in rows])
    lines.append(f"producer_variance\t{variance:g}")
    print("\n".join(lines))
    if args.figure:
        from .figures import save_category_figure

        labels = [(Path(path).name if path != "-" else "-", m) for path, m in rows]
        save_category_figure(labels, args.figure)
        print(f"figure written to {args.figure}", file=sys.stderr)
    return 0


def cmd_diff(args) -> int:
    report = diff(_load_plan(args.a), _load_plan(args.b))
    print(json.dumps(report.to_json_dict(), ensure_ascii=False))
    return 0


def cmd_render(args) -> int:
    plan = _load_plan(args.path)
    opts = RenderOptions(
        show_properties=not args.no_properties,
        max_value_length=args.max_value_length,
        color_by_category=not args.no_color,
    )
    output = to_dot(plan, opts) if args.format == "dot" else to_html(plan, opts)
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uplan",
        description="Convert, compare, and visualize database query plans.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="parse one DBMS plan into the unified form")
    p.add_argument(
        "--dialect",
        required=True,
        choices=[d.value for d in Dialect],
        help="input flavor",
    )
    p.add_argument("path", nargs="?", default="-", help="input file, - for stdin")
    p.add_argument(
        "--format",
        choices=["json", "text", "pretty"],
        default="json",
        help="output form (default json)",
    )
    p.add_argument("--mapping", help="name mapping table (overrides UPLAN_MAPPING)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("fingerprint", help="stable digest of each plan's structure")
    p.add_argument("paths", nargs="*", help="unified plan files, - for stdin")
    p.add_argument(
        "--policy",
        help="policy JSON file, or 'none' to hash every property as-is",
    )
    p.set_defaults(func=cmd_fingerprint)

    p = sub.add_parser("cert", help="compare root row estimates of two plans")
    p.add_argument("base", help="plan of the base query")
    p.add_argument("restricted", help="plan of the more restrictive query")
    p.add_argument("--tolerance", type=float, default=0.0)
    p.set_defaults(func=cmd_cert)

    p = sub.add_parser("metrics", help="per-category operation counts as TSV")
    p.add_argument("paths", nargs="+", help="unified plan files")
    p.add_argument("--figure", help="also write a bar chart to this file")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("diff", help="structural difference of two plans as JSON")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("render", help="emit Graphviz DOT or standalone HTML")
    p.add_argument("path", nargs="?", default="-", help="unified plan file")
    p.add_argument("--format", choices=["dot", "html"], default="dot")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--no-properties", action="store_true")
    p.add_argument("--no-color", action="store_true")
    p.add_argument("--max-value-length", type=int, default=48)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (PlanError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
