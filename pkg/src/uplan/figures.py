"""Chart output for the metrics report.

matplotlib is imported lazily and pointed at the Agg backend so the CLI
works on headless machines and never pops a window.
"""

from __future__ import annotations

from .analysis import CategoryMetrics
from .plan import OperationCategory

# Same hues as the DOT/HTML renderers so the chart and the tree agree.
_COLORS = {
    OperationCategory.PRODUCER: "#5ba3e0",
    OperationCategory.COMBINATOR: "#e8a33d",
    OperationCategory.JOIN: "#9467bd",
    OperationCategory.FOLDER: "#5cb85c",
    OperationCategory.EXECUTOR: "#8c8c8c",
    OperationCategory.PROJECTOR: "#d4c11f",
    OperationCategory.CONSUMER: "#d9534f",
}


def save_category_figure(rows: list[tuple[str, CategoryMetrics]], path: str) -> None:
    """Write a grouped bar chart of per-category operation counts.

    One bar group per plan, one bar per category; the file format
    follows the path suffix (png, svg, pdf).
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    categories = list(OperationCategory)
    group_width = 0.8
    bar_width = group_width / len(categories)
    fig, ax = plt.subplots(figsize=(max(6.0, 1.6 * len(rows)), 4.0))
    for offset, category in enumerate(categories):
        xs = [
            i - group_width / 2 + bar_width * (offset + 0.5)
            for i in range(len(rows))
        ]
        ys = [metrics.counts[category] for _, metrics in rows]
        ax.bar(xs, ys, width=bar_width, color=_COLORS[category], label=category.value)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels([label for label, _ in rows], rotation=20, ha="right")
    ax.set_ylabel("operations")
    ax.set_title("operations per category")
    ax.legend(fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
