"""PostgreSQL EXPLAIN conversion, text and JSON flavors."""

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from uplan import OperationCategory, PropertyCategory, convert, iter_nodes, serialize_json
from uplan.dialects.postgresql import parse_cost
from uplan.errors import ConversionError


def producer_count(plan):
    return sum(
        1
        for node in iter_nodes(plan)
        if node.operation.category is OperationCategory.PRODUCER
    )


def load(fixtures, name):
    return (fixtures / name).read_text()


class TestTextFixtures:
    def test_single_scan_matches_expected(self, fixtures):
        plan = convert("postgresql_text", load(fixtures, "postgresql_text/single_filter_scan.txt"))
        expected = load(fixtures, "postgresql_text/single_filter_scan.expected.json").strip()
        assert serialize_json(plan) == expected
        assert plan.warnings == []

    def test_union_group_matches_expected(self, fixtures):
        plan = convert(
            "postgresql_text", load(fixtures, "postgresql_text/union_group.txt")
        )
        expected = load(fixtures, "postgresql_text/union_group.expected.json").strip()
        assert serialize_json(plan) == expected
        assert plan.warnings == []

    def test_union_group_shape(self, fixtures):
        plan = convert(
            "postgresql_text", load(fixtures, "postgresql_text/union_group.txt")
        )
        nodes = list(iter_nodes(plan))
        assert len(nodes) == 12
        assert producer_count(plan) == 4
        root_costs = {
            p.identifier: p.value
            for p in plan.root.properties
            if p.category is PropertyCategory.COST
        }
        assert root_costs["cost_total"] == 63009.32
        assert plan.plan_properties[0].identifier == "planning_time_ms"
        assert plan.plan_properties[0].value == 0.124


class TestTextDetails:
    def test_truncated_attribute_groups(self):
        text = (
            " HashAggregate  (cost=62998.82..63009.32 rows=1050...)\n"
            "   ->  Seq Scan on t0  (cost=0.00...)\n"
        )
        plan = convert("postgresql_text", text)
        root_props = {p.identifier: p.value for p in plan.root.properties}
        assert root_props["cost_start"] == 62998.82
        assert root_props["cost_total"] == 63009.32
        assert root_props["estimated_rows"] == 1050
        leaf_props = {p.identifier: p.value for p in plan.root.children[0].properties}
        assert leaf_props["cost_start"] == 0.0
        assert "cost_total" not in leaf_props

    def test_parallel_prefix_becomes_status(self):
        plan = convert("postgresql_text", " Parallel Seq Scan on t0  (cost=0.00..35.50)\n")
        assert plan.root.operation.identifier == "Full_Table_Scan"
        assert any(
            p.category is PropertyCategory.STATUS and p.identifier == "parallel" and p.value is True
            for p in plan.root.properties
        )

    def test_index_scan_names(self):
        plan = convert(
            "postgresql_text",
            " Index Scan using t1_pkey on t1 alias_t  (cost=0.29..8.30 rows=1 width=8)\n",
        )
        props = {p.identifier: p.value for p in plan.root.properties}
        assert props["name_index"] == "t1_pkey"
        assert props["name_object"] == "t1"
        assert props["name_alias"] == "alias_t"

    def test_actual_runtime_group(self):
        text = (
            " Seq Scan on t0  (cost=0.00..1.10 rows=10 width=4) "
            "(actual time=0.011..0.013 rows=10 loops=1)\n"
        )
        plan = convert("postgresql_text", text)
        props = {p.identifier: p.value for p in plan.root.properties}
        assert props["actual_time_total_ms"] == 0.013
        assert props["actual_rows"] == 10
        assert props["actual_loops"] == 1

    def test_never_executed(self):
        plan = convert(
            "postgresql_text",
            " Seq Scan on t0  (cost=0.00..1.10 rows=10 width=4) (never executed)\n",
        )
        assert any(p.identifier == "never_executed" for p in plan.root.properties)

    def test_indented_detail_lines_attach_to_node(self):
        text = (
            " Hash Join  (cost=1.00..2.00 rows=1 width=4)\n"
            "   Hash Cond: (a.id = b.id)\n"
            "   ->  Seq Scan on a  (cost=0.00..1.00 rows=1 width=4)\n"
            "         Filter: (x > 0)\n"
            "   ->  Seq Scan on b  (cost=0.00..1.00 rows=1 width=4)\n"
        )
        plan = convert("postgresql_text", text)
        assert any(p.identifier == "hash_cond" for p in plan.root.properties)
        assert any(p.identifier == "filter" for p in plan.root.children[0].properties)

    def test_unknown_operation_falls_back_with_warning(self):
        plan = convert("postgresql_text", " Quantum Scan on t0  (cost=0.00..1.00)\n")
        assert plan.root.operation.category is OperationCategory.EXECUTOR
        assert any("Quantum Scan" in w for w in plan.warnings)

    def test_empty_input(self):
        plan = convert("postgresql_text", "")
        assert plan.root is None
        assert any("empty input" in w for w in plan.warnings)
        assert plan.dialect == "postgresql_text"


@pytest.mark.parametrize(
    "literal,expected",
    [
        ("cost=0.00..169.25", (0.0, 169.25)),
        ("cost=62998.82..63009.32", (62998.82, 63009.32)),
    ],
)
def test_parse_cost(literal, expected):
    assert parse_cost(literal) == expected


def test_parse_cost_rejects_garbage():
    with pytest.raises(ConversionError):
        parse_cost("cost=high")


# Oracle for the indentation law: render a known random tree the way
# EXPLAIN lays one out, convert it back, and compare shapes.

def _random_shape(rng, depth=0):
    if depth >= 4 or rng.random() < 0.4:
        return ("Seq Scan", [])
    children = [_random_shape(rng, depth + 1) for _ in range(rng.randint(1, 3))]
    return ("Hash Join", children)


def _render(shape, level, out):
    name, children = shape
    suffix = " on t0" if name == "Seq Scan" else ""
    line = f"{name}{suffix}  (cost=0.00..1.00 rows=1 width=4)"
    if level == 0:
        out.append(" " + line)
    else:
        out.append(" " * (1 + 6 * (level - 1)) + "->  " + line)
    for child in children:
        _render(child, level + 1, out)


def _shape_of(node):
    raw = "Seq Scan" if node.operation.identifier == "Full_Table_Scan" else "Hash Join"
    return (raw, [_shape_of(c) for c in node.children])


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_indentation_law_round_trip(seed):
    shape = _random_shape(random.Random(seed))
    lines = []
    _render(shape, 0, lines)
    plan = convert("postgresql_text", "\n".join(lines) + "\n")
    assert _shape_of(plan.root) == shape


class TestJson:
    def test_fixture_matches_expected(self, fixtures):
        plan = convert(
            "postgresql_json", load(fixtures, "postgresql_json/sort_hash_join.json")
        )
        expected = load(fixtures, "postgresql_json/sort_hash_join.expected.json").strip()
        assert serialize_json(plan) == expected
        assert plan.warnings == []

    def test_wrapping_list_unwrapped(self):
        doc = [{"Plan": {"Node Type": "Seq Scan", "Relation Name": "t0"}}]
        plan = convert("postgresql_json", json.dumps(doc))
        assert plan.root.operation.identifier == "Full_Table_Scan"

    def test_top_level_attributes_become_plan_properties(self):
        doc = {"Plan": {"Node Type": "Seq Scan"}, "Planning Time": 0.124}
        plan = convert("postgresql_json", json.dumps(doc))
        assert plan.plan_properties[0].identifier == "planning_time_ms"
        assert plan.plan_properties[0].value == 0.124

    def test_structured_attribute_skipped_with_warning(self):
        doc = {"Plan": {"Node Type": "Seq Scan", "Workers": [{"Worker Number": 0}]}}
        plan = convert("postgresql_json", json.dumps(doc))
        assert any("Workers" in w for w in plan.warnings)

    def test_scalar_list_joined(self):
        doc = {"Plan": {"Node Type": "Sort", "Sort Key": ["a", "b"]}}
        plan = convert("postgresql_json", json.dumps(doc))
        props = {p.identifier: p.value for p in plan.root.properties}
        assert props["sort_key"] == "a, b"

    def test_modify_table_uses_operation(self):
        doc = {"Plan": {"Node Type": "ModifyTable", "Operation": "Insert"}}
        plan = convert("postgresql_json", json.dumps(doc))
        assert plan.root.operation.category is OperationCategory.CONSUMER

    def test_missing_plan_key_warns(self):
        plan = convert("postgresql_json", '{"Planning Time": 1.0}')
        assert plan.root is None
        assert any("no 'Plan'" in w for w in plan.warnings)

    def test_malformed_json_raises(self):
        with pytest.raises(ConversionError):
            convert("postgresql_json", "{oops")

    def test_text_and_json_agree_on_fixture(self, fixtures):
        text_plan = convert(
            "postgresql_text", load(fixtures, "postgresql_text/single_filter_scan.txt")
        )
        doc = {
            "Plan": {
                "Node Type": "Seq Scan",
                "Relation Name": "t0",
                "Startup Cost": 0.00,
                "Total Cost": 169.25,
                "Plan Rows": 3323,
                "Plan Width": 8,
                "Filter": "(c0 < 5)",
            }
        }
        json_plan = convert("postgresql_json", json.dumps(doc))
        text_ids = {
            (p.category, p.identifier, p.value) for p in text_plan.root.properties
        }
        json_ids = {
            (p.category, p.identifier, p.value) for p in json_plan.root.properties
        }
        assert text_ids == json_ids
        assert text_plan.root.operation == json_plan.root.operation
