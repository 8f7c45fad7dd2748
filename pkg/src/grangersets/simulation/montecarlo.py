"""
Monte Carlo harness: generate many panels from a benchmark network, test every
ordered set pair, and count how often each method declares an edge.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import pandas as pd

from ..core.analyzer import METHODS, SetGrangerAnalyzer
from ..core.bootstrap import BootstrapConfig
from ..utils.exceptions import GrangerSetsError, MonteCarloError, ValidationError, validate_positive
from ..utils.logging_config import ROOT_LOGGER, LogContext
from ..utils.rng import BOOTSTRAP_STREAM, PANEL_STREAM, derive_seed
from .networks import SET_LABELS, SimSpec, generate

logger = logging.getLogger(__name__)

MAX_FAILED_FRACTION = 0.01
REFERENCE_RUNS = 10_000

# rows = from, columns = to, over sets (I, II, III)
REFERENCE_COUNTS: Dict[Tuple[str, str], np.ndarray] = {
    ("sim1", "pcca"): np.array([[10000, 8543, 507], [461, 9979, 6646], [500, 8015, 437]]),
    ("sim2", "pcca"): np.array([[7154, 10000, 505], [466, 10000, 463], [1490, 10000, 6263]]),
    ("sim2", "wald"): np.array([[1079, 9980, 589], [547, 9997, 522], [1015, 9827, 2107]]),
}


@dataclass(frozen=True, eq=False)
class DetectionMatrix:
    counts: np.ndarray  # (from, to)
    runs: int
    method: str
    labels: Tuple[str, ...] = SET_LABELS
    failed_runs: int = 0

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        L = len(self.labels)
        if counts.shape != (L, L):
            raise ValidationError(
                "counts must be square over the set labels",
                details={"shape": counts.shape, "labels": L},
            )
        if counts.min(initial=0) < 0 or counts.max(initial=0) > self.runs:
            raise ValidationError(
                "counts must lie in [0, runs]",
                details={"runs": self.runs, "max": int(counts.max(initial=0))},
            )
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def rates(self) -> np.ndarray:
        if self.runs == 0:
            return np.zeros(self.counts.shape)
        return self.counts / self.runs

    @property
    def standard_errors(self) -> np.ndarray:
        if self.runs == 0:
            return np.zeros(self.counts.shape)
        rates = self.rates
        return np.sqrt(rates * (1.0 - rates) / self.runs)

    def rate(self, source: str, target: str) -> float:
        return float(self.rates[self.labels.index(source), self.labels.index(target)])

    def to_frame(self, kind: str = "counts") -> pd.DataFrame:
        values = {"counts": self.counts, "rates": self.rates, "se": self.standard_errors}
        if kind not in values:
            raise ValidationError("unknown matrix kind", details={"kind": kind})
        frame = pd.DataFrame(values[kind], index=list(self.labels), columns=list(self.labels))
        frame.index.name = "from"
        return frame

    def write_csv(self, path: Union[str, Path], kind: str = "counts"):
        float_format = None if kind == "counts" else "%.6f"
        self.to_frame(kind).to_csv(path, float_format=float_format, lineterminator="\n")


def truth_frame(truth: np.ndarray, labels: Sequence[str]) -> pd.DataFrame:
    frame = pd.DataFrame(truth.astype(int), index=list(labels), columns=list(labels))
    frame.index.name = "from"
    return frame


def _replicate(args) -> Optional[Dict[str, np.ndarray]]:
    """Rejection indicators per method for one replicate, or None if it failed."""
    spec, methods, cfg, r = args
    panel_spec = replace(spec, seed=derive_seed(spec.seed, r, PANEL_STREAM))
    replicate_cfg = replace(cfg, seed=derive_seed(cfg.seed, r, BOOTSTRAP_STREAM))

    with LogContext(ROOT_LOGGER, "WARNING"):
        try:
            panel, partition, _ = generate(panel_spec)
            analyzer = SetGrangerAnalyzer(panel, partition, replicate_cfg, methods)
            results = analyzer.run()
        except GrangerSetsError as e:
            logger.warning("Replicate %d failed: %s", r, e.message)
            return None

    labels = partition.labels
    L = len(labels)
    rejected = {method: np.zeros((L, L), dtype=bool) for method in methods}
    for result in results:
        f, t = labels.index(result.source), labels.index(result.target)
        if "pcca" in methods:
            rejected["pcca"][f, t] = result.gc.p_value < cfg.alpha
        if "wald" in methods:
            rejected["wald"][f, t] = result.wald_p_value < cfg.alpha
    return rejected


def run_monte_carlo(
    spec: SimSpec,
    methods: Sequence[str] = ("pcca",),
    runs: int = 100,
    cfg: Optional[BootstrapConfig] = None,
    workers: int = 1,
) -> Dict[str, DetectionMatrix]:
    """Detection counts per method; both methods see the same panels."""
    validate_positive(runs, "runs")
    validate_positive(workers, "workers")
    methods = tuple(dict.fromkeys(methods))
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise ValidationError(
            "unknown or empty method list",
            details={"methods": ", ".join(methods), "allowed": ", ".join(METHODS)},
        )
    cfg = cfg or BootstrapConfig()
    labels = SET_LABELS[: len(spec.network.set_sizes)]
    L = len(labels)

    logger.info(
        "Monte Carlo %s: %d runs, methods=%s, B=%d, workers=%d",
        spec.which,
        runs,
        ",".join(methods),
        cfg.replicates,
        workers,
    )

    jobs = [(spec, methods, cfg, r) for r in range(runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunksize = max(1, runs // (4 * workers))
            outcomes = list(pool.map(_replicate, jobs, chunksize=chunksize))
    else:
        outcomes = []
        step = max(1, runs // 10)
        for job in jobs:
            outcomes.append(_replicate(job))
            if len(outcomes) % step == 0:
                logger.info("Finished %d/%d replicates", len(outcomes), runs)

    counts = {method: np.zeros((L, L), dtype=np.int64) for method in methods}
    failed = 0
    for outcome in outcomes:
        if outcome is None:
            failed += 1
            continue
        for method in methods:
            counts[method] += outcome[method]

    if failed > MAX_FAILED_FRACTION * runs:
        raise MonteCarloError(
            "too many Monte Carlo replicates failed",
            details={"failed": failed, "runs": runs, "which": spec.which},
        )
    if failed:
        logger.warning("%d of %d replicates failed and were skipped", failed, runs)

    done = runs - failed
    return {
        method: DetectionMatrix(counts[method], done, method, labels, failed)
        for method in methods
    }


@dataclass(frozen=True)
class CalibrationRow:
    source: str
    target: str
    method: str
    observed: float
    reference: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.observed - self.reference) <= self.tolerance


def calibration_tolerance(reference: float, runs: int) -> float:
    variance = max(reference * (1.0 - reference), 0.05 * 0.95)
    return 3.0 * float(np.sqrt(variance / runs))


def calibration_report(matrix: DetectionMatrix, spec: SimSpec) -> List[CalibrationRow]:
    """Observed rates against the published reference rates, one row per cell.

    Empty when no reference exists for this network and method.
    """
    reference = REFERENCE_COUNTS.get((spec.which, matrix.method))
    if reference is None or matrix.runs == 0:
        return []
    rows = []
    rates = matrix.rates
    for f, source in enumerate(matrix.labels):
        for t, target in enumerate(matrix.labels):
            p_ref = reference[f, t] / REFERENCE_RUNS
            rows.append(
                CalibrationRow(
                    source=source,
                    target=target,
                    method=matrix.method,
                    observed=float(rates[f, t]),
                    reference=float(p_ref),
                    tolerance=calibration_tolerance(p_ref, matrix.runs),
                )
            )
    return rows


def calibration_frame(rows: Sequence[CalibrationRow]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "method": row.method,
                "from": row.source,
                "to": row.target,
                "observed": row.observed,
                "reference": row.reference,
                "tolerance": row.tolerance,
                "passed": row.passed,
            }
            for row in rows
        ],
        columns=["method", "from", "to", "observed", "reference", "tolerance", "passed"],
    )
