"""
Overlapping-block bootstrap test of H0: rho = 0 for one directed set pair.

Resampling happens on the lag-aligned frame: a block of aligned rows carries
its own (present, lagged) pairs, so the seams between blocks never act as lag
transitions. The present columns and the conditioning columns follow one block
stream, the lagged predictor columns follow an independent one.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, NamedTuple, Optional, Union
import logging

import numpy as np

from .lagcov import ConditioningRule, assemble_blocks, conditional_cov
from .panel import LaggedDesign, SetPartition, TimeSeriesPanel, lag_align
from .pcca import canonical_rho
from ..utils.exceptions import (
    NumericalError,
    ResamplingError,
    ValidationError,
    validate_in_range,
    validate_positive,
)
from ..utils.rng import substream

logger = logging.getLogger(__name__)

AUTO = "auto"
DEFAULT_REPLICATES = 1000
DEFAULT_ALPHA = 0.05
MAX_REDRAWS = 3
MAX_FAILED_FRACTION = 0.05


class XStream(str, Enum):
    """Which block stream the conditioning columns follow."""

    RESPONSE = "response"
    PREDICTOR = "predictor"
    INDEPENDENT = "independent"


def auto_block_length(n_rows: int) -> int:
    """ceil(N^(1/3)) for N aligned rows, e.g. 5 for T = 100."""
    l = 1
    while l**3 < n_rows:
        l += 1
    return l


@dataclass(frozen=True)
class BootstrapConfig:
    replicates: int = DEFAULT_REPLICATES
    block_length: Union[int, str] = AUTO
    alpha: float = DEFAULT_ALPHA
    seed: int = 0
    x_stream: XStream = XStream.RESPONSE
    conditioning: ConditioningRule = field(default_factory=ConditioningRule)
    ridge: Optional[float] = None

    def __post_init__(self):
        validate_positive(self.replicates, "replicates")
        if self.block_length != AUTO:
            validate_positive(self.block_length, "block_length")
        validate_in_range(self.alpha, "alpha", 0.0, 1.0)
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0 or self.seed >= 2**64:
            raise ValidationError("seed must be a 64-bit non-negative integer", details={"seed": self.seed})
        object.__setattr__(self, "x_stream", XStream(self.x_stream))

    def resolve_block_length(self, n_rows: int) -> int:
        l = auto_block_length(n_rows) if self.block_length == AUTO else int(self.block_length)
        if not 1 <= l <= n_rows:
            raise ValidationError(
                "block length must lie in [1, N]",
                details={"block_length": l, "rows": n_rows},
            )
        return l


@dataclass(frozen=True, eq=False)
class GcTestResult:
    response: str
    predictor: str
    rho_hat: float
    null_rhos: np.ndarray
    p_value: float
    l_used: int
    B_used: int
    alpha: float
    failed_replicates: int = 0

    @property
    def significant(self) -> bool:
        return self.p_value < self.alpha

    @property
    def pair(self):
        """(from, to) in graph orientation."""
        return (self.predictor, self.response)


def make_blocks(n_rows: int, block_length: int) -> List[range]:
    """The N - l + 1 overlapping windows of consecutive row indices (0-based)."""
    if not 1 <= block_length <= n_rows:
        raise ValidationError(
            "block length must lie in [1, N]",
            details={"block_length": block_length, "rows": n_rows},
        )
    return [range(start, start + block_length) for start in range(n_rows - block_length + 1)]


def block_indices(n_rows: int, block_length: int, rng: np.random.Generator) -> np.ndarray:
    """Row indices of ceil(N/l) windows drawn with replacement, laid end to end
    and truncated to N."""
    windows = make_blocks(n_rows, block_length)
    n_blocks = -(-n_rows // block_length)
    picks = rng.integers(0, len(windows), size=n_blocks)
    rows = np.fromiter((row for p in picks for row in windows[p]), dtype=np.intp)
    return rows[:n_rows]


class BlockRows(NamedTuple):
    """Row streams of one bootstrap replicate."""

    response: np.ndarray
    predictor: np.ndarray
    conditioning: np.ndarray


def draw_rows(
    n_rows: int,
    block_length: int,
    rng: np.random.Generator,
    x_stream: XStream = XStream.RESPONSE,
) -> BlockRows:
    """Independent response and predictor streams; the conditioning stream is
    shared with one of them or drawn on its own, per ``x_stream``."""
    x_stream = XStream(x_stream)
    if block_length >= n_rows - 1:
        raise ValidationError(
            "block length leaves too few distinct windows to resample",
            details={"block_length": block_length, "rows": n_rows},
        )
    response_rows = block_indices(n_rows, block_length, rng)
    predictor_rows = block_indices(n_rows, block_length, rng)
    if x_stream is XStream.RESPONSE:
        x_rows = response_rows
    elif x_stream is XStream.PREDICTOR:
        x_rows = predictor_rows
    else:
        x_rows = block_indices(n_rows, block_length, rng)
    return BlockRows(response_rows, predictor_rows, x_rows)


def apply_rows(design: LaggedDesign, partition: SetPartition, j: str, rows: BlockRows) -> LaggedDesign:
    predictors = set(partition.members(j))
    j_mask = np.array([s in predictors for s in design.series_names])
    present = design.present[rows.response]
    lagged = np.where(j_mask[None, :], design.lagged[rows.predictor], design.lagged[rows.conditioning])
    return LaggedDesign(design.series_names, present, lagged)


def resample_panel(
    design: LaggedDesign,
    partition: SetPartition,
    i: str,
    j: str,
    block_length: int,
    rng: np.random.Generator,
    x_stream: XStream = XStream.RESPONSE,
) -> LaggedDesign:
    """One bootstrap replicate of the aligned frame.

    Present columns follow the response stream, lagged columns of set j follow
    the predictor stream, and the remaining lagged columns follow the stream
    selected by ``x_stream``.
    """
    partition.members(i)
    rows = draw_rows(design.n_rows, block_length, rng, x_stream)
    return apply_rows(design, partition, j, rows)


def pair_rho(
    design: LaggedDesign,
    partition: SetPartition,
    i: str,
    j: str,
    conditioning: ConditioningRule = ConditioningRule(),
    ridge: Optional[float] = None,
) -> float:
    """Largest partial canonical correlation of present set i with lagged set j."""
    blocks = assemble_blocks(design, partition, i, j, conditioning)
    return canonical_rho(conditional_cov(blocks, ridge))


def p_value(rho_hat: float, null_rhos: np.ndarray) -> float:
    """(1 + #{rho* >= rho_hat}) / (B + 1)."""
    null_rhos = np.asarray(null_rhos)
    return float((1 + np.count_nonzero(null_rhos >= rho_hat)) / (null_rhos.size + 1))


def gc_test(
    panel: Union[TimeSeriesPanel, LaggedDesign],
    partition: SetPartition,
    i: str,
    j: str,
    cfg: BootstrapConfig = BootstrapConfig(),
) -> GcTestResult:
    """Does set j Granger-cause set i? Self-loops (i == j) are allowed."""
    design = lag_align(panel) if isinstance(panel, TimeSeriesPanel) else panel
    N = design.n_rows
    l = cfg.resolve_block_length(N)
    if 2 * l >= N:
        raise ValidationError(
            "block length must be below half the aligned row count",
            details={"block_length": l, "rows": N},
        )

    rho_hat = pair_rho(design, partition, i, j, cfg.conditioning, cfg.ridge)

    null_rhos = np.empty(cfg.replicates)
    used = 0
    failed = 0
    for b in range(cfg.replicates):
        rng = substream(cfg.seed, b)
        for attempt in range(MAX_REDRAWS + 1):
            replicate = resample_panel(design, partition, i, j, l, rng, cfg.x_stream)
            try:
                null_rhos[used] = pair_rho(replicate, partition, i, j, cfg.conditioning, cfg.ridge)
                used += 1
                break
            except NumericalError as e:
                logger.debug("Replicate %d attempt %d failed: %s", b, attempt, e)
        else:
            failed += 1
            logger.warning("Replicate %d of %s->%s failed after %d redraws", b, j, i, MAX_REDRAWS)
            if failed > MAX_FAILED_FRACTION * cfg.replicates:
                raise ResamplingError(
                    "too many bootstrap replicates failed",
                    details={"pair": f"{j}->{i}", "failed": failed, "replicates": cfg.replicates},
                )

    null_rhos = null_rhos[:used]
    null_rhos.setflags(write=False)
    result = GcTestResult(
        response=i,
        predictor=j,
        rho_hat=rho_hat,
        null_rhos=null_rhos,
        p_value=p_value(rho_hat, null_rhos),
        l_used=l,
        B_used=used,
        alpha=cfg.alpha,
        failed_replicates=failed,
    )
    logger.debug("Tested %s->%s: rho=%.4f p=%.4f", j, i, result.rho_hat, result.p_value)
    return result
