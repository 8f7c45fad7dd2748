"""
Set-level Granger causality (grangersets)
"""

from importlib.metadata import PackageNotFoundError, version

from .core import (
    BootstrapConfig,
    SetGrangerAnalyzer,
    SetPartition,
    TimeSeriesPanel,
    build_graph,
    fit_var1,
    gc_test,
    lag_align,
    load_panel,
    load_partition,
    solve_pcca,
    wald_block_test,
)
from .simulation import SimSpec, generate, run_monte_carlo
from .utils import (
    setup_logging,
    get_logger,
    GrangerSetsError,
    IngestionError,
    ValidationError,
    ConfigurationError,
    NumericalError,
    ResamplingError,
    MonteCarloError,
)

__all__ = [
    "BootstrapConfig",
    "SetGrangerAnalyzer",
    "SetPartition",
    "TimeSeriesPanel",
    "build_graph",
    "fit_var1",
    "gc_test",
    "lag_align",
    "load_panel",
    "load_partition",
    "solve_pcca",
    "wald_block_test",
    "SimSpec",
    "generate",
    "run_monte_carlo",
    "setup_logging",
    "get_logger",
    "GrangerSetsError",
    "IngestionError",
    "ValidationError",
    "ConfigurationError",
    "NumericalError",
    "ResamplingError",
    "MonteCarloError",
    "__version__",
]

try:
    __version__ = version("grangersets")
except PackageNotFoundError:
    __version__ = "0.0.0"
