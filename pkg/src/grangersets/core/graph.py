"""
Set-level causality graphs: one node per set label, one edge record per tested
ordered pair, each edge tiered by its p-value.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union
import logging

from .analyzer import EdgeResult
from .bootstrap import GcTestResult
from .panel import SetPartition
from .pcca import LoadingReport
from ..utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

STRONG = "strong"
WEAK = "weak"
NONE = "none"
TIERS = (STRONG, WEAK, NONE)

# half-open: p == 0.05 is weak, p == 0.10 is none
STRONG_P = 0.05
WEAK_P = 0.10


def tier_for(p_value: float) -> str:
    if p_value < STRONG_P:
        return STRONG
    if p_value < WEAK_P:
        return WEAK
    return NONE


@dataclass(frozen=True)
class SetNode:
    label: str
    members: Tuple[str, ...]


@dataclass(frozen=True, eq=False)
class SetEdge:
    source: str
    target: str
    rho: Optional[float]
    p_value: float
    tier: str
    wald_p_value: Optional[float] = None
    l_used: Optional[int] = None
    B_used: Optional[int] = None
    loadings: Optional[LoadingReport] = None

    @property
    def is_self_loop(self) -> bool:
        return self.source == self.target

    def meets(self, tier: str) -> bool:
        """True when this edge is at least as significant as ``tier``."""
        return TIERS.index(self.tier) <= TIERS.index(tier)


@dataclass(frozen=True)
class SetGraph:
    nodes: Tuple[SetNode, ...]
    edges: Tuple[SetEdge, ...]

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(node.label for node in self.nodes)

    def edge(self, source: str, target: str) -> Optional[SetEdge]:
        for edge in self.edges:
            if edge.source == source and edge.target == target:
                return edge
        return None


def _edge_from(result: Union[EdgeResult, GcTestResult]) -> SetEdge:
    if isinstance(result, GcTestResult):
        return SetEdge(
            source=result.predictor,
            target=result.response,
            rho=result.rho_hat,
            p_value=result.p_value,
            tier=tier_for(result.p_value),
            l_used=result.l_used,
            B_used=result.B_used,
        )
    gc = result.gc
    p = gc.p_value if gc is not None else result.wald_p_value
    if p is None:
        raise ValidationError("edge result carries no p-value", details={"pair": f"{result.source}->{result.target}"})
    return SetEdge(
        source=result.source,
        target=result.target,
        rho=gc.rho_hat if gc is not None else None,
        p_value=p,
        tier=tier_for(p),
        wald_p_value=result.wald_p_value,
        l_used=gc.l_used if gc is not None else None,
        B_used=gc.B_used if gc is not None else None,
        loadings=result.loadings,
    )


def build_graph(
    results: Iterable[Union[EdgeResult, GcTestResult]],
    partition: Optional[SetPartition] = None,
) -> SetGraph:
    """Tiered set graph; nodes come from ``partition`` when given, otherwise
    from the labels seen in ``results``."""
    edges: List[SetEdge] = []
    seen = set()
    for result in results:
        edge = _edge_from(result)
        key = (edge.source, edge.target)
        if key in seen:
            raise ValidationError("duplicate result for an ordered pair", details={"pair": f"{key[0]}->{key[1]}"})
        seen.add(key)
        edges.append(edge)

    if partition is not None:
        nodes = [SetNode(label, partition.members(label)) for label in partition.labels]
        known = set(partition.labels)
        stray = sorted({label for key in seen for label in key} - known)
        if stray:
            raise ValidationError("results name labels outside the partition", details={"labels": ", ".join(stray)})
    else:
        labels = sorted({label for key in seen for label in key})
        nodes = [SetNode(label, ()) for label in labels]

    nodes.sort(key=lambda node: node.label)
    edges.sort(key=lambda edge: (edge.source, edge.target))
    logger.debug("Built graph with %d nodes and %d edges", len(nodes), len(edges))
    return SetGraph(tuple(nodes), tuple(edges))


@dataclass(frozen=True)
class SetFlow:
    label: str
    out_flow: float
    in_flow: float
    self_flow: float
    out_degree: int
    in_degree: int
    role: str  # source, sink, hub or isolated


def _role(out_degree: int, in_degree: int) -> str:
    if out_degree and in_degree:
        return "hub"
    if out_degree:
        return "source"
    if in_degree:
        return "sink"
    return "isolated"


def flow_summary(graph: SetGraph, tier: str = STRONG) -> List[SetFlow]:
    """Total canonical correlation flowing out of and into each set over the
    edges at or above ``tier``."""
    if tier not in (STRONG, WEAK):
        raise ValidationError("flow tier must be strong or weak", details={"tier": tier})
    flows = []
    for label in graph.labels:
        outgoing = [e for e in graph.edges if e.source == label and not e.is_self_loop and e.meets(tier)]
        incoming = [e for e in graph.edges if e.target == label and not e.is_self_loop and e.meets(tier)]
        loop = graph.edge(label, label)
        flows.append(
            SetFlow(
                label=label,
                out_flow=sum(e.rho or 0.0 for e in outgoing),
                in_flow=sum(e.rho or 0.0 for e in incoming),
                self_flow=(loop.rho or 0.0) if loop is not None and loop.meets(tier) else 0.0,
                out_degree=len(outgoing),
                in_degree=len(incoming),
                role=_role(len(outgoing), len(incoming)),
            )
        )
    return flows


def significant_edges(graph: SetGraph, tier: str = STRONG) -> Sequence[SetEdge]:
    return [edge for edge in graph.edges if edge.tier != NONE and edge.meets(tier)]
