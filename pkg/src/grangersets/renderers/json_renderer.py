import json
from dataclasses import asdict
from typing import Any, Dict, List, Optional, Sequence

from .base import BaseRenderer
from ..core.graph import SetEdge, SetGraph, flow_summary
from ..core.pcca import LoadingReport
from ..core.var_baseline import SeriesEdge


def _loadings(report: Optional[LoadingReport]) -> Optional[Dict[str, Any]]:
    if report is None:
        return None
    return {
        "response": [{"series": l.series, "weight": l.weight} for l in report.response],
        "predictor": [{"series": l.series, "weight": l.weight} for l in report.predictor],
    }


def _edge(edge: SetEdge, with_wald: bool) -> Dict[str, Any]:
    record = {
        "from": edge.source,
        "to": edge.target,
        "rho": edge.rho,
        "p_value": edge.p_value,
        "tier": edge.tier,
        "l_used": edge.l_used,
        "B_used": edge.B_used,
    }
    if with_wald:
        record["wald_p_value"] = edge.wald_p_value
    if edge.loadings is not None:
        record["loadings"] = _loadings(edge.loadings)
    return record


class JSONRenderer(BaseRenderer):
    """Full-precision result sidecar:
    ``{nodes, edges, config, flow[, within_set]}``."""

    def __init__(self, pretty: bool = True, indent: int = 2, sort_keys: bool = False):
        super().__init__()
        self.pretty = pretty
        self.indent = indent if pretty else None
        self.sort_keys = sort_keys

    def render(
        self,
        data: SetGraph,
        config: Optional[Dict[str, Any]] = None,
        within_set: Optional[Sequence[SeriesEdge]] = None,
    ) -> str:
        with_wald = any(edge.wald_p_value is not None for edge in data.edges)
        output: Dict[str, Any] = {
            "nodes": [{"label": n.label, "members": list(n.members)} for n in data.nodes],
            "edges": [_edge(edge, with_wald) for edge in data.edges],
            "config": config or {},
            "flow": [asdict(flow) for flow in flow_summary(data)],
        }
        if within_set is not None:
            output["within_set"] = self._within_set(within_set)
        return self.dumps(output)

    def dumps(self, output: Any) -> str:
        return json.dumps(
            output,
            ensure_ascii=False,
            indent=self.indent,
            sort_keys=self.sort_keys,
            allow_nan=False,
        ) + "\n"

    def _within_set(self, edges: Sequence[SeriesEdge]) -> List[Dict[str, Any]]:
        return [
            {
                "set": edge.set_label,
                "from": edge.source,
                "to": edge.target,
                "coefficient": edge.coefficient,
                "standard_error": edge.standard_error,
                "p_value": edge.p_value,
                "significant": edge.significant,
            }
            for edge in edges
        ]

    def set_style(self, style):
        self.style = style

        if isinstance(style, dict):
            if "pretty" in style:
                self.pretty = style["pretty"]
                self.indent = 2 if self.pretty else None
            if "indent" in style:
                self.indent = style["indent"]
            if "sort_keys" in style:
                self.sort_keys = style["sort_keys"]
