"""Optional PNG rendering of the dependency graph.

Imports of the plotting stack happen lazily so the core library stays free
of heavyweight dependencies; install the ``viz`` extra to use this module.
"""
from __future__ import annotations

from .analysis import DependencyGraph, Verdict, dp_label, is_nontrivial, sccs

_PALETTE = ("#aec7e8", "#ffbb78", "#98df8a", "#d9d02f", "#c5b0d5", "#c7c7c7")


def render_graph_png(graph: DependencyGraph, path: str, verdict: Verdict | None = None) -> None:
    """Draw the graph to a PNG file with components colored and strictly
    decreasing nodes outlined."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        import networkx as nx
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise RuntimeError(
            "PNG export needs the plotting extras; install with: pip install 'treeterm[viz]'"
        ) from exc

    g = nx.DiGraph()
    for i, dp in enumerate(graph.nodes):
        g.add_node(i)
    g.add_edges_from(sorted(graph.edges))

    color_of: dict[int, str] = {}
    for rank, scc in enumerate(c for c in sccs(graph) if is_nontrivial(c, graph)):
        for i in scc:
            color_of[i] = _PALETTE[rank % len(_PALETTE)]
    strict: set[int] = set()
    if verdict is not None:
        for cert in verdict.certificates:
            strict.update(cert.strict)

    fig, ax = plt.subplots(figsize=(max(6, 1.6 * len(graph.nodes)), 6))
    pos = nx.spring_layout(g, seed=0) if graph.nodes else {}
    node_colors = [color_of.get(i, "#f0f0f0") for i in g.nodes]
    edge_colors = ["black" if i in strict else "#707070" for i in g.nodes]
    widths = [2.5 if i in strict else 1.0 for i in g.nodes]
    nx.draw_networkx_nodes(
        g, pos, ax=ax, node_color=node_colors, edgecolors=edge_colors,
        linewidths=widths, node_size=1800,
    )
    nx.draw_networkx_edges(
        g, pos, ax=ax, arrows=True, arrowsize=18, connectionstyle="arc3,rad=0.08",
        node_size=1800,
    )
    labels = {i: dp_label(dp).replace(" -> ", "\n→ ") for i, dp in enumerate(graph.nodes)}
    nx.draw_networkx_labels(g, pos, labels=labels, ax=ax, font_size=7)
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
