"""
DOT export of set graphs. Solid arrows are strong edges (p < 0.05), dashed
arrows are weak edges (p < 0.10); edges with no support are left out of the
drawing but kept in the JSON record.
"""

from typing import Dict, Sequence
import logging

import graphviz

from .base import BaseRenderer
from ..core.graph import NONE, STRONG, SetEdge, SetGraph
from ..core.var_baseline import SeriesEdge

logger = logging.getLogger(__name__)

EDGE_STYLES = {STRONG: "solid", "weak": "dashed"}


def edge_label(edge: SetEdge) -> str:
    if edge.rho is None:
        return f"p={edge.p_value:.3f}"
    return f"ρ={edge.rho:.3f}, p={edge.p_value:.3f}"


class DotRenderer(BaseRenderer):
    def __init__(self, name: str = "set_granger", show_members: bool = True):
        super().__init__()
        self.name = name
        self.show_members = show_members

    def render(self, data: SetGraph) -> str:
        dot = graphviz.Digraph(name=self.name)
        dot.attr("node", shape=self.style.get("shape", "ellipse"))
        for node in sorted(data.nodes, key=lambda n: n.label):
            if self.show_members and node.members:
                dot.node(node.label, tooltip=", ".join(node.members))
            else:
                dot.node(node.label)
        drawn = 0
        for edge in sorted(data.edges, key=lambda e: (e.source, e.target)):
            if edge.tier == NONE:
                continue
            dot.edge(edge.source, edge.target, label=edge_label(edge), style=EDGE_STYLES[edge.tier])
            drawn += 1
        logger.debug("Rendered DOT with %d of %d edges", drawn, len(data.edges))
        return dot.source

    def render_series(self, edges: Sequence[SeriesEdge], groups: Dict[str, Sequence[str]]) -> str:
        """Per-series graph: one cluster per set, significant within-set VAR
        coefficients as grey dotted arrows."""
        dot = graphviz.Digraph(name=f"{self.name}_series")
        for label in sorted(groups):
            with dot.subgraph(name=f"cluster_{label}") as cluster:
                cluster.attr(label=label)
                for series in groups[label]:
                    cluster.node(series)
        for edge in sorted(edges, key=lambda e: (e.set_label, e.source, e.target)):
            if not edge.significant:
                continue
            dot.edge(
                edge.source,
                edge.target,
                label=f"{edge.coefficient:.3f}",
                style="dotted",
                color="grey",
            )
        return dot.source

    def set_style(self, style):
        self.style = style
        if isinstance(style, dict) and "show_members" in style:
            self.show_members = style["show_members"]


def to_dot(graph: SetGraph) -> str:
    return DotRenderer().render(graph)
