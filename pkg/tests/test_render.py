"""DOT and HTML rendering: structure counts, escaping, determinism."""

import random
import re

import pytest
from hypothesis import given, settings, strategies as st

from uplan import (
    Operation,
    OperationCategory,
    PlanNode,
    Property,
    PropertyCategory,
    RenderOptions,
    UnifiedPlan,
    iter_nodes,
    to_dot,
    to_html,
)
from uplan.errors import PlanValidationError

from gen import random_plan

_NODE_LINE = re.compile(r"^\s*(n\d+)\s\[", re.MULTILINE)
_EDGE_LINE = re.compile(r"^\s*(n\d+)\s->\s(n\d+);", re.MULTILINE)


def scan(obj="t0"):
    return PlanNode(
        Operation(OperationCategory.PRODUCER, "Full_Table_Scan"),
        [Property(PropertyCategory.CONFIGURATION, "name_object", obj)],
    )


def join_plan():
    return UnifiedPlan(
        root=PlanNode(Operation(OperationCategory.JOIN, "Hash_Join"), [], [scan("a"), scan("b")])
    )


class TestDot:
    def test_node_and_edge_counts(self):
        dot = to_dot(join_plan())
        assert len(_NODE_LINE.findall(dot)) == 3
        assert len(_EDGE_LINE.findall(dot)) == 2

    def test_preorder_numbering(self):
        dot = to_dot(join_plan())
        assert _EDGE_LINE.findall(dot) == [("n0", "n1"), ("n0", "n2")]

    def test_labels_show_category_and_name(self):
        dot = to_dot(join_plan())
        assert "Join->Hash Join" in dot
        assert "Producer->Full Table Scan" in dot

    def test_palette_applied(self):
        dot = to_dot(join_plan())
        assert "#e6d5f7" in dot  # Join fill
        assert "#cfe8ff" in dot  # Producer fill

    def test_color_can_be_turned_off(self):
        dot = to_dot(join_plan(), RenderOptions(color_by_category=False))
        assert "#e6d5f7" not in dot

    def test_properties_can_be_hidden(self):
        dot = to_dot(join_plan(), RenderOptions(show_properties=False))
        assert "name object" not in dot

    def test_plan_properties_become_graph_label(self):
        plan = UnifiedPlan(
            root=scan(),
            plan_properties=[Property(PropertyCategory.STATUS, "planning_time_ms", 0.124)],
        )
        dot = to_dot(plan)
        assert 'graph [label="planning time ms: 0.124"' in dot

    def test_empty_plan_placeholder(self):
        dot = to_dot(UnifiedPlan())
        assert "empty plan" in dot
        assert len(_EDGE_LINE.findall(dot)) == 0

    def test_quotes_and_newlines_escaped(self):
        plan = UnifiedPlan(
            root=PlanNode(
                Operation(OperationCategory.PRODUCER, "X"),
                [Property(PropertyCategory.CONFIGURATION, "filter", 'say "hi"\nthen stop')],
            )
        )
        dot = to_dot(plan)
        assert '\\"hi\\"' in dot
        # Raw newlines never appear inside a label attribute.
        for line in dot.splitlines():
            if "label=" in line:
                assert line.count('"') % 2 == 0

    def test_long_values_elided(self):
        plan = UnifiedPlan(
            root=PlanNode(
                Operation(OperationCategory.PRODUCER, "X"),
                [Property(PropertyCategory.CONFIGURATION, "filter", "v" * 100)],
            )
        )
        dot = to_dot(plan, RenderOptions(max_value_length=10))
        assert "v" * 9 + "…" in dot
        assert "v" * 10 not in dot

    def test_unknown_category_drawn_dashed(self):
        plan = UnifiedPlan(root=PlanNode(Operation("Scanner", "X")))
        dot = to_dot(plan)
        assert "dashed" in dot

    def test_other_invalid_plans_still_rejected(self):
        plan = UnifiedPlan(root=PlanNode(Operation(OperationCategory.PRODUCER, "2bad")))
        with pytest.raises(PlanValidationError):
            to_dot(plan)

    def test_min_value_length_enforced(self):
        with pytest.raises(ValueError):
            RenderOptions(max_value_length=7)


class TestHtml:
    def test_structure(self):
        page = to_html(join_plan())
        assert page.count('<li class="node">') == 3
        assert page.startswith("<!DOCTYPE html>")
        assert "Hash Join" in page

    def test_escaping(self):
        plan = UnifiedPlan(
            root=PlanNode(
                Operation(OperationCategory.PRODUCER, "X"),
                [Property(PropertyCategory.CONFIGURATION, "filter", "<script>alert(1)</script>")],
            )
        )
        page = to_html(plan)
        assert "<script>" not in page
        assert "&lt;script&gt;" in page

    def test_dialect_in_heading(self):
        plan = UnifiedPlan(root=scan())
        plan.dialect = "sqlite_text"
        assert "sqlite_text" in to_html(plan)

    def test_empty_plan(self):
        assert "empty plan" in to_html(UnifiedPlan())

    def test_unknown_category_badge(self):
        plan = UnifiedPlan(root=PlanNode(Operation("Scanner", "X")))
        page = to_html(plan)
        assert 'badge unknown' in page
        assert "Scanner" in page

    def test_plan_properties_listed(self):
        plan = UnifiedPlan(
            plan_properties=[Property(PropertyCategory.STATUS, "planning_time_ms", 0.124)]
        )
        assert "planning time ms: 0.124" in to_html(plan)


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_dot_counts_match_plan_shape(seed):
    plan = random_plan(random.Random(seed))
    dot = to_dot(plan)
    nodes = list(iter_nodes(plan))
    edges = sum(len(n.children) for n in nodes)
    expected_nodes = len(nodes) if plan.root is not None else 1
    assert len(_NODE_LINE.findall(dot)) == expected_nodes
    assert len(_EDGE_LINE.findall(dot)) == edges


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_renderers_are_deterministic(seed):
    plan = random_plan(random.Random(seed))
    assert to_dot(plan) == to_dot(plan)
    assert to_html(plan) == to_html(plan)
