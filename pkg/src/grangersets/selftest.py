"""
Fast numerical self-checks run by ``grangersets selftest``.

Each check draws its own random instances from a seeded substream and returns
a :class:`CheckResult`; none of them touches the filesystem.
"""

from dataclasses import dataclass
from typing import Callable, List, Tuple
import logging

import numpy as np

from .core.bootstrap import BootstrapConfig, gc_test
from .core.lagcov import conditional_cov, covariance_from_columns
from .core.panel import SetPartition, TimeSeriesPanel
from .core.pcca import canonical_matrices, solve_pcca
from .core.var_baseline import fit_var1, wald_statistic
from .utils.rng import substream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _instance(rng: np.random.Generator, m: int, n: int, q: int, N: int):
    """Correlated present/lagged/conditioning columns."""
    latent = rng.standard_normal((N, 2))
    present_i = rng.standard_normal((N, m)) + latent[:, :1]
    lagged_j = rng.standard_normal((N, n)) + latent[:, :1] + latent[:, 1:]
    lagged_x = rng.standard_normal((N, q)) + latent[:, 1:]
    return present_i, lagged_j, lagged_x


def _rho(present_i, lagged_j, lagged_x) -> float:
    blocks = covariance_from_columns(present_i, lagged_j, lagged_x)
    return solve_pcca(conditional_cov(blocks, ridge=0.0)).rho


def check_spectral_identity(seed: int, instances: int = 200) -> CheckResult:
    rng = substream(seed, 0)
    worst_gap, lowest, highest = 0.0, 0.0, 0.0
    for _ in range(instances):
        m, n, q = rng.integers(1, 4, size=3)
        data = _instance(rng, m, n, q, int(rng.integers(20, 60)))
        cond = conditional_cov(covariance_from_columns(*data), ridge=0.0)
        _, _, _, A, B = canonical_matrices(cond)
        d = min(m, n)
        a = np.sort(np.linalg.eigvalsh(A))[::-1][:d]
        b = np.sort(np.linalg.eigvalsh(B))[::-1][:d]
        worst_gap = max(worst_gap, float(np.abs(a - b).max()))
        lowest = min(lowest, float(a.min()))
        highest = max(highest, float(a.max()))
    passed = worst_gap < 1e-8 and lowest >= -1e-8 and highest <= 1.0 + 1e-6
    return CheckResult(
        "spectral identity",
        bool(passed),
        f"max gap {worst_gap:.2e}, eigenvalues in [{lowest:.3g}, {highest:.6f}]",
    )


def check_invariance(seed: int, instances: int = 100) -> CheckResult:
    rng = substream(seed, 1)
    worst = 0.0
    for _ in range(instances):
        m, n, q = rng.integers(1, 4, size=3)
        present_i, lagged_j, lagged_x = _instance(rng, m, n, q, 40)
        base = _rho(present_i, lagged_j, lagged_x)
        for side in range(3):
            cols = (present_i, lagged_j, lagged_x)[side]
            M = np.eye(cols.shape[1]) + 0.3 * rng.standard_normal((cols.shape[1],) * 2)
            moved = [present_i, lagged_j, lagged_x]
            moved[side] = cols @ M
            worst = max(worst, abs(_rho(*moved) - base))
    return CheckResult("linear invariance", bool(worst < 1e-8), f"max change {worst:.2e}")


def check_partial_correlation(seed: int, instances: int = 100) -> CheckResult:
    rng = substream(seed, 2)
    worst = 0.0
    for _ in range(instances):
        q = int(rng.integers(0, 3))
        present_i, lagged_j, lagged_x = _instance(rng, 1, 1, q, 30)
        Z = np.hstack([np.ones((30, 1)), lagged_x])
        ry = present_i[:, 0] - Z @ np.linalg.lstsq(Z, present_i[:, 0], rcond=None)[0]
        rx = lagged_j[:, 0] - Z @ np.linalg.lstsq(Z, lagged_j[:, 0], rcond=None)[0]
        oracle = abs(np.corrcoef(ry, rx)[0, 1])
        worst = max(worst, abs(_rho(present_i, lagged_j, lagged_x) - oracle))
    return CheckResult("partial correlation oracle", bool(worst < 1e-10), f"max error {worst:.2e}")


def check_var_recovery(seed: int) -> CheckResult:
    values = 0.4 ** np.arange(30.0)
    fit = fit_var1(TimeSeriesPanel(("z",), values[:, None]))
    error = abs(fit.coefficients[0, 0] - 0.4)

    rng = substream(seed, 3)
    noisy = fit_var1(TimeSeriesPanel(("a", "b"), rng.standard_normal((60, 2))))
    z = noisy.coefficients[0, 1] / noisy.standard_error(0, 1)
    identity = abs(wald_statistic(noisy, [0], [1]) - z**2)
    passed = error < 1e-10 and identity < 1e-10
    return CheckResult("VAR recovery", bool(passed), f"coefficient error {error:.2e}, z^2 gap {identity:.2e}")


def check_bootstrap_determinism(seed: int) -> CheckResult:
    rng = substream(seed, 4)
    panel = TimeSeriesPanel(("a", "b"), rng.standard_normal((60, 2)))
    partition = SetPartition({"a": "A", "b": "B"})
    cfg = BootstrapConfig(replicates=49, seed=seed)
    first = gc_test(panel, partition, "A", "B", cfg)
    second = gc_test(panel, partition, "A", "B", cfg)
    same = np.array_equal(first.null_rhos, second.null_rhos) and first.p_value == second.p_value
    in_range = 1.0 / (cfg.replicates + 1) <= first.p_value <= 1.0
    return CheckResult("bootstrap determinism", bool(same and in_range), f"p={first.p_value:.4f}")


CHECKS: Tuple[Callable[[int], CheckResult], ...] = (
    check_spectral_identity,
    check_invariance,
    check_partial_correlation,
    check_var_recovery,
    check_bootstrap_determinism,
)


def run_selftest(seed: int = 0) -> List[CheckResult]:
    results = []
    for check in CHECKS:
        result = check(seed)
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(level, "%s: %s (%s)", result.name, "ok" if result.passed else "FAILED", result.detail)
        results.append(result)
    return results
