"""Static plan visualizations: Graphviz DOT text and a standalone HTML page.

Both emitters are deterministic (equal input, identical bytes) and escape
every label, so predicate strings full of quotes or markup cannot break
the document. Nodes whose category is not one of the seven known ones
still render, drawn dashed (DOT) or with a plain badge (HTML) to flag
them, which keeps output useful for plans from newer producers.
"""

from __future__ import annotations

import html
from dataclasses import dataclass

from .errors import PlanValidationError
from .plan import (
    OperationCategory,
    PlanNode,
    Property,
    PropertyCategory,
    UnifiedPlan,
    display_keyword,
    validate,
)
from .textform import display_value


@dataclass(frozen=True)
class RenderOptions:
    show_properties: bool = True
    max_value_length: int = 48
    color_by_category: bool = True

    def __post_init__(self):
        if self.max_value_length < 8:
            raise ValueError("max_value_length must be at least 8")


_PALETTE = {
    OperationCategory.PRODUCER: "#cfe8ff",
    OperationCategory.COMBINATOR: "#ffe9c7",
    OperationCategory.JOIN: "#e6d5f7",
    OperationCategory.FOLDER: "#d9f2d9",
    OperationCategory.EXECUTOR: "#f0f0f0",
    OperationCategory.PROJECTOR: "#fff3b0",
    OperationCategory.CONSUMER: "#ffd6d6",
}

_UNKNOWN_FILL = "#ffffff"


def _check(plan: UnifiedPlan) -> None:
    # Unknown categories are drawn in a generic style rather than
    # rejected; everything else invalid stays an error.
    violations = [
        v
        for v in validate(plan)
        if "unknown operation category" not in v and "unknown property category" not in v
    ]
    if violations:
        raise PlanValidationError(violations)


def _elide(text: str, limit: int) -> str:
    if len(text) <= limit:
        return text
    return text[: limit - 1] + "…"


def _category_name(category) -> str:
    return category.value if isinstance(category, OperationCategory) else str(category)


def _property_line(prop: Property, opts: RenderOptions) -> str:
    value = _elide(display_value(prop.value), opts.max_value_length)
    return f"{display_keyword(prop.identifier)}: {value}"


def _dot_escape(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"')
    return out.replace("\r\n", "\n").replace("\n", "\\n")


def _dot_label(node: PlanNode, opts: RenderOptions) -> str:
    lines = [f"{_category_name(node.operation.category)}->{display_keyword(node.operation.identifier)}"]
    if opts.show_properties:
        lines.extend(_property_line(p, opts) for p in node.properties)
    return "\\n".join(_dot_escape(line) for line in lines)


def to_dot(plan: UnifiedPlan, opts: RenderOptions | None = None) -> str:
    _check(plan)
    if opts is None:
        opts = RenderOptions()
    out = ["digraph plan {"]
    out.append('  node [shape=box, fontname="Helvetica", fontsize=10];')
    if plan.plan_properties:
        label = "\\n".join(
            _dot_escape(_property_line(p, opts)) for p in plan.plan_properties
        )
        out.append(f'  graph [label="{label}", labelloc="t", fontsize=10];')
    if plan.root is None:
        out.append('  n0 [label="empty plan", style=dashed];')
        out.append("}")
        return "\n".join(out) + "\n"
    nodes: list[PlanNode] = []
    stack = [plan.root]
    while stack:
        node = stack.pop()
        nodes.append(node)
        stack.extend(reversed(node.children))
    ids = {id(node): f"n{i}" for i, node in enumerate(nodes)}
    for node in nodes:
        category = node.operation.category
        attrs = [f'label="{_dot_label(node, opts)}"']
        if isinstance(category, OperationCategory):
            attrs.append('style=filled')
            fill = _PALETTE[category] if opts.color_by_category else _UNKNOWN_FILL
            attrs.append(f'fillcolor="{fill}"')
        else:
            attrs.append('style="filled,dashed"')
            attrs.append(f'fillcolor="{_UNKNOWN_FILL}"')
            attrs.append('color="#666666"')
        out.append(f"  {ids[id(node)]} [{', '.join(attrs)}];")
    for node in nodes:
        for child in node.children:
            out.append(f"  {ids[id(node)]} -> {ids[id(child)]};")
    out.append("}")
    return "\n".join(out) + "\n"


_CSS = """\
body { font-family: -apple-system, 'Segoe UI', Helvetica, Arial, sans-serif;
       margin: 1.5rem; color: #1a1a1a; background: #fff; }
ul.tree, ul.tree ul { list-style: none; padding-left: 1.4rem;
       border-left: 1px solid #ddd; }
ul.tree { border-left: none; padding-left: 0; }
li.node { margin: 0.35rem 0; }
.badge { display: inline-block; padding: 0.05rem 0.45rem; border-radius: 0.6rem;
       font-size: 0.78rem; border: 1px solid rgba(0,0,0,0.25); margin-right: 0.4rem; }
.badge.unknown { border-style: dashed; background: #fff; }
.op { font-weight: 600; }
ul.props { list-style: none; padding-left: 2.1rem; border-left: none;
       color: #444; font-size: 0.85rem; margin: 0.15rem 0; }
ul.props li::before { content: "\\2022 "; color: #999; }
.plan-props { color: #444; font-size: 0.9rem; margin-bottom: 1rem; }
summary { cursor: pointer; }
"""


def _badge(category) -> str:
    name = _category_name(category)
    if isinstance(category, OperationCategory):
        fill = _PALETTE[category]
        return f'<span class="badge" style="background:{fill}">{html.escape(name)}</span>'
    return f'<span class="badge unknown">{html.escape(name)}</span>'


def _html_node(node: PlanNode, opts: RenderOptions, out: list[str]) -> None:
    out.append('<li class="node"><details open><summary>')
    out.append(_badge(node.operation.category))
    out.append(
        f'<span class="op">{html.escape(display_keyword(node.operation.identifier))}</span>'
    )
    out.append("</summary>")
    if opts.show_properties and node.properties:
        out.append('<ul class="props">')
        for prop in node.properties:
            out.append(f"<li>{html.escape(_property_line(prop, opts))}</li>")
        out.append("</ul>")
    if node.children:
        out.append("<ul>")
        for child in node.children:
            _html_node(child, opts, out)
        out.append("</ul>")
    out.append("</details></li>")


def to_html(plan: UnifiedPlan, opts: RenderOptions | None = None) -> str:
    _check(plan)
    if opts is None:
        opts = RenderOptions()
    out = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        "<title>query plan</title>",
        f"<style>{_CSS}</style>",
        "</head>",
        "<body>",
    ]
    if plan.dialect:
        out.append(f"<h1>query plan ({html.escape(plan.dialect)})</h1>")
    else:
        out.append("<h1>query plan</h1>")
    if plan.plan_properties:
        out.append('<div class="plan-props">')
        for prop in plan.plan_properties:
            out.append(f"<div>{html.escape(_property_line(prop, opts))}</div>")
        out.append("</div>")
    if plan.root is None:
        out.append("<p>empty plan</p>")
    else:
        out.append('<ul class="tree">')
        _html_node(plan.root, opts, out)
        out.append("</ul>")
    out.append("</body>")
    out.append("</html>")
    return "\n".join(out) + "\n"


__all__ = ["RenderOptions", "to_dot", "to_html"]
