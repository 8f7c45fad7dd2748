from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from .bootstrap import BootstrapConfig, GcTestResult, gc_test
from .panel import LaggedDesign, SetPartition, TimeSeriesPanel, lag_align
from .pcca import LoadingReport, canonical_loadings, solve_pcca
from .lagcov import partialize
from .var_baseline import SeriesEdge, VarFit, fit_var1, wald_block_test, within_set_edges
from ..utils.exceptions import GrangerSetsError, ValidationError
from ..utils.rng import derive_seed

logger = logging.getLogger(__name__)

METHODS = ("pcca", "wald")


@dataclass(frozen=True, eq=False)
class EdgeResult:
    source: str  # predictor set j
    target: str  # response set i
    gc: Optional[GcTestResult] = None
    loadings: Optional[LoadingReport] = None
    wald_p_value: Optional[float] = None

    @property
    def key(self) -> Tuple[str, str]:
        return (self.source, self.target)


def with_pair(error: GrangerSetsError, source: str, target: str) -> GrangerSetsError:
    """The same kind of error, with the offending ordered pair named."""
    return type(error)(
        f"testing {source}->{target} failed: {error.message}",
        details={"pair": f"{source}->{target}", **error.details},
        cause=error.cause,
    )


def ordered_pairs(partition: SetPartition, include_self_loops: bool = True) -> List[Tuple[str, str]]:
    """(from, to) for every ordered label pair, self-loops included by default."""
    return [
        (source, target)
        for source in partition.labels
        for target in partition.labels
        if include_self_loops or source != target
    ]


def pair_seed(seed: int, partition: SetPartition, source: str, target: str) -> int:
    return derive_seed(seed, partition.labels.index(source), partition.labels.index(target))


def _test_pcca(design, partition, source, target, cfg) -> Tuple[GcTestResult, LoadingReport]:
    pair_cfg = replace(cfg, seed=pair_seed(cfg.seed, partition, source, target))
    result = gc_test(design, partition, target, source, pair_cfg)
    pcca = solve_pcca(partialize(design, partition, target, source, cfg.conditioning, cfg.ridge))
    return result, canonical_loadings(pcca)


def _pcca_job(args):
    design, partition, source, target, cfg = args
    try:
        return _test_pcca(design, partition, source, target, cfg)
    except GrangerSetsError as e:
        raise with_pair(e, source, target) from e


class SetGrangerAnalyzer:
    def __init__(
        self,
        panel: TimeSeriesPanel,
        partition: SetPartition,
        config: Optional[BootstrapConfig] = None,
        methods: Sequence[str] = ("pcca",),
        include_self_loops: bool = True,
    ):
        unknown = [m for m in methods if m not in METHODS]
        if unknown or not methods:
            raise ValidationError(
                "unknown or empty method list",
                details={"methods": ", ".join(methods), "allowed": ", ".join(METHODS)},
            )
        partition.validate_against(panel)
        self.panel = panel
        self.partition = partition
        self.config = config or BootstrapConfig()
        self.methods = tuple(methods)
        self.include_self_loops = include_self_loops
        self.design: LaggedDesign = lag_align(panel)
        self._var_fit: Optional[VarFit] = None

        logger.info(
            "Analyzer initialized: T=%d, k=%d, %d sets, methods=%s",
            panel.T,
            panel.k,
            len(partition.labels),
            ",".join(self.methods),
        )

    @property
    def var_fit(self) -> VarFit:
        if self._var_fit is None:
            self._var_fit = fit_var1(self.design)
        return self._var_fit

    def pairs(self) -> List[Tuple[str, str]]:
        return ordered_pairs(self.partition, self.include_self_loops)

    def test_pair(self, source: str, target: str) -> EdgeResult:
        gc = loadings = wald_p = None
        try:
            if "pcca" in self.methods:
                gc, loadings = _test_pcca(self.design, self.partition, source, target, self.config)
            if "wald" in self.methods:
                wald_p = wald_block_test(self.var_fit, self.partition, target, source)
        except GrangerSetsError as e:
            logger.error("Error testing %s->%s: %s", source, target, e.message)
            raise with_pair(e, source, target) from e
        return EdgeResult(source, target, gc, loadings, wald_p)

    def run(self, workers: int = 1) -> List[EdgeResult]:
        pairs = self.pairs()
        logger.info("Testing %d ordered set pairs", len(pairs))

        if workers > 1 and "pcca" in self.methods:
            jobs = [(self.design, self.partition, s, t, self.config) for s, t in pairs]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                pcca_results = list(pool.map(_pcca_job, jobs))
            results = []
            for (source, target), (gc, loadings) in zip(pairs, pcca_results):
                wald_p = None
                if "wald" in self.methods:
                    try:
                        wald_p = wald_block_test(self.var_fit, self.partition, target, source)
                    except GrangerSetsError as e:
                        raise with_pair(e, source, target) from e
                results.append(EdgeResult(source, target, gc, loadings, wald_p))
        else:
            results = [self.test_pair(source, target) for source, target in pairs]

        significant = sum(1 for r in results if r.gc is not None and r.gc.significant)
        logger.info("Finished %d tests, %d significant", len(results), significant)
        return results

    def within_set(self, alpha: Optional[float] = None) -> List[SeriesEdge]:
        return within_set_edges(self.var_fit, self.partition, alpha or self.config.alpha)

    def get_statistics(self) -> Dict[str, object]:
        return {
            "T": self.panel.T,
            "k": self.panel.k,
            "sets": len(self.partition.labels),
            "pairs": len(self.pairs()),
            "methods": list(self.methods),
        }
