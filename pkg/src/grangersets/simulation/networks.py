"""
The two benchmark networks: sparse VAR(1) systems over three sets whose
set-level causal structure is known.

Each network is written as a list of ``(target, source, sign)`` couplings; the
coefficient matrix is ``coefficient * sign`` at ``[target, source]``.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from ..core.panel import MIN_TIME_POINTS, SetPartition, TimeSeriesPanel
from ..utils.exceptions import ValidationError, validate_positive
from ..utils.rng import PANEL_STREAM, substream

logger = logging.getLogger(__name__)

SET_LABELS = ("I", "II", "III")
DEFAULT_BURN_IN = 100
DEFAULT_COEFFICIENTS = {"sim1": 0.4, "sim2": 0.2}


@dataclass(frozen=True)
class Network:
    prefix: str
    set_sizes: Tuple[int, ...]
    couplings: Tuple[Tuple[int, int, int], ...]  # 1-based (target, source, sign)

    @property
    def k(self) -> int:
        return sum(self.set_sizes)

    @property
    def series_names(self) -> Tuple[str, ...]:
        return tuple(f"{self.prefix}{c}" for c in range(1, self.k + 1))

    def partition(self) -> SetPartition:
        groups: Dict[str, List[str]] = {}
        names = iter(self.series_names)
        for label, size in zip(SET_LABELS, self.set_sizes):
            groups[label] = [next(names) for _ in range(size)]
        return SetPartition.from_groups(groups)

    def coefficients(self, coefficient: float) -> np.ndarray:
        A = np.zeros((self.k, self.k))
        for target, source, sign in self.couplings:
            A[target - 1, source - 1] = sign * coefficient
        return A


NETWORKS = {
    "sim1": Network(
        prefix="Z",
        set_sizes=(5, 5, 4),
        couplings=(
            (1, 1, 1), (1, 4, -1),
            (2, 1, 1),
            (3, 1, 1), (3, 5, -1),
            (4, 2, 1),
            (6, 8, 1),
            (7, 3, 1), (7, 6, -1),
            (8, 10, 1),
            (9, 5, 1), (9, 7, -1), (9, 14, 1),
            (10, 9, 1), (10, 13, -1),
            (11, 8, 1),
        ),
    ),
    "sim2": Network(
        prefix="W",
        set_sizes=(5, 5, 3),
        couplings=(
            (1, 1, 1),
            (2, 1, 1), (2, 5, -1),
            (3, 1, 1), (3, 4, -1),
            (4, 2, 1), (4, 4, -1),
            (5, 3, 1), (5, 13, -1),
            (6, 3, 1),
            (7, 3, 1), (7, 6, -1),
            (8, 3, 1), (8, 7, -1),
            (9, 3, 1), (9, 8, -1),
            (10, 3, 1), (10, 9, -1), (10, 12, 1),
            (11, 11, 1), (11, 13, -1),
            (12, 11, 1),
            (13, 12, 1),
        ),
    ),
}


@dataclass(frozen=True)
class SimSpec:
    which: str = "sim1"
    T: int = 100
    coefficient: Optional[float] = None  # None picks the network's default
    burn_in: int = DEFAULT_BURN_IN
    seed: int = 0

    def __post_init__(self):
        if self.which not in NETWORKS:
            raise ValidationError(
                "unknown network",
                details={"which": self.which, "allowed": ", ".join(NETWORKS)},
            )
        validate_positive(self.T, "T")
        if self.T < MIN_TIME_POINTS:
            raise ValidationError(
                f"simulated panels need at least {MIN_TIME_POINTS} time points",
                details={"T": self.T},
            )
        if isinstance(self.burn_in, bool) or not isinstance(self.burn_in, int) or self.burn_in < 0:
            raise ValidationError("burn_in must be a non-negative integer", details={"burn_in": self.burn_in})
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit non-negative integer", details={"seed": self.seed})
        if self.coefficient is None:
            object.__setattr__(self, "coefficient", DEFAULT_COEFFICIENTS[self.which])
        if not np.isfinite(self.coefficient):
            raise ValidationError("coefficient must be finite", details={"coefficient": self.coefficient})

    @property
    def network(self) -> Network:
        return NETWORKS[self.which]


def spectral_radius(A: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvals(A)).max(initial=0.0))


def truth_matrix(A: np.ndarray, partition: SetPartition, series_names: Sequence[str]) -> np.ndarray:
    """truth[from, to] is True when some series of ``from`` drives a series of ``to``."""
    index = {name: c for c, name in enumerate(series_names)}
    L = len(partition.labels)
    truth = np.zeros((L, L), dtype=bool)
    for f, source in enumerate(partition.labels):
        cols = [index[s] for s in partition.members(source)]
        for t, target in enumerate(partition.labels):
            rows = [index[s] for s in partition.members(target)]
            truth[f, t] = bool(np.any(A[np.ix_(rows, cols)] != 0))
    return truth


def simulate_var1(A: np.ndarray, T: int, burn_in: int, rng: np.random.Generator) -> np.ndarray:
    """z_t = A z_{t-1} + e_t from z = 0, keeping the last T steps."""
    k = A.shape[0]
    noise = rng.standard_normal((burn_in + T, k))
    z = np.zeros(k)
    out = np.empty((T, k))
    for t in range(burn_in + T):
        z = A @ z + noise[t]
        if t >= burn_in:
            out[t - burn_in] = z
    return out


def generate(spec: SimSpec) -> Tuple[TimeSeriesPanel, SetPartition, np.ndarray]:
    network = spec.network
    A = network.coefficients(spec.coefficient)
    radius = spectral_radius(A)
    if radius >= 1.0:
        raise ValidationError(
            "coefficient gives an unstable system",
            details={"which": spec.which, "coefficient": spec.coefficient, "spectral_radius": radius},
        )

    partition = network.partition()
    values = simulate_var1(A, spec.T, spec.burn_in, substream(spec.seed, PANEL_STREAM))
    panel = TimeSeriesPanel(network.series_names, values)
    truth = truth_matrix(A, partition, network.series_names)
    logger.debug("Generated %s panel: T=%d, seed=%d", spec.which, spec.T, spec.seed)
    return panel, partition, truth
