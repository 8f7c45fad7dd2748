from .panel import (
    LaggedDesign,
    SetPartition,
    TimeSeriesPanel,
    lag_align,
    load_panel,
    load_partition,
    write_panel,
)
from .lagcov import (
    BlockCovariance,
    ConditionalCovariance,
    ConditioningRule,
    assemble_blocks,
    conditional_cov,
    partialize,
    sample_cov,
)
from .pcca import PccaResult, LoadingReport, canonical_loadings, inv_sqrt_sym, solve_pcca
from .bootstrap import (
    BlockRows,
    BootstrapConfig,
    GcTestResult,
    XStream,
    draw_rows,
    gc_test,
    make_blocks,
    p_value,
    pair_rho,
    resample_panel,
)
from .var_baseline import SeriesEdge, VarFit, fit_var1, wald_block_test, within_set_edges
from .analyzer import EdgeResult, SetGrangerAnalyzer, ordered_pairs
from .graph import SetEdge, SetFlow, SetGraph, SetNode, build_graph, flow_summary, tier_for

__all__ = [
    "LaggedDesign",
    "SetPartition",
    "TimeSeriesPanel",
    "lag_align",
    "load_panel",
    "load_partition",
    "write_panel",
    "BlockCovariance",
    "ConditionalCovariance",
    "ConditioningRule",
    "assemble_blocks",
    "conditional_cov",
    "partialize",
    "sample_cov",
    "PccaResult",
    "LoadingReport",
    "canonical_loadings",
    "inv_sqrt_sym",
    "solve_pcca",
    "BlockRows",
    "BootstrapConfig",
    "GcTestResult",
    "XStream",
    "draw_rows",
    "gc_test",
    "make_blocks",
    "p_value",
    "pair_rho",
    "resample_panel",
    "SeriesEdge",
    "VarFit",
    "fit_var1",
    "wald_block_test",
    "within_set_edges",
    "EdgeResult",
    "SetGrangerAnalyzer",
    "ordered_pairs",
    "SetEdge",
    "SetFlow",
    "SetGraph",
    "SetNode",
    "build_graph",
    "flow_summary",
    "tier_for",
]
