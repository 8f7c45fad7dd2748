"""
Full VAR(1) fitted by equation-wise least squares, and Wald tests that a block
of lag coefficients is jointly zero.
"""

from dataclasses import dataclass
from typing import List, Sequence, Union
import logging

import numpy as np
from scipy import stats

from .panel import LaggedDesign, SetPartition, TimeSeriesPanel, lag_align
from ..utils.exceptions import RankDeficiencyError, SingularityError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class VarFit:
    series_names: tuple
    coefficients: np.ndarray  # (r, c): effect of lagged series c on present series r
    intercepts: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    sigma_u: np.ndarray  # residual covariance, df-corrected
    zz_inv: np.ndarray  # inverse Gram matrix of [1, lagged]
    df_resid: int

    @property
    def k(self) -> int:
        return self.coefficients.shape[0]

    def coefficient_covariance(self) -> np.ndarray:
        """Covariance of the lag coefficients stacked row by row (equation-major)."""
        return np.kron(self.sigma_u, self.zz_inv[1:, 1:])

    def standard_error(self, r: int, c: int) -> float:
        return float(np.sqrt(self.sigma_u[r, r] * self.zz_inv[c + 1, c + 1]))


def fit_var1(design: Union[LaggedDesign, TimeSeriesPanel]) -> VarFit:
    if isinstance(design, TimeSeriesPanel):
        design = lag_align(design)
    N, k = design.present.shape
    if N <= k + 1:
        raise RankDeficiencyError(
            "VAR(1) needs more aligned rows than regressors",
            details={"rows": N, "regressors": k + 1},
        )
    Z = np.hstack([np.ones((N, 1)), design.lagged])
    rank = np.linalg.matrix_rank(Z)
    if rank < k + 1:
        raise RankDeficiencyError(
            "VAR(1) regressor matrix is rank deficient",
            details={"rank": int(rank), "regressors": k + 1},
        )

    params, *_ = np.linalg.lstsq(Z, design.present, rcond=None)
    fitted = Z @ params
    residuals = design.present - fitted
    df_resid = N - (k + 1)
    sigma_u = residuals.T @ residuals / df_resid
    zz_inv = np.linalg.inv(Z.T @ Z)

    logger.debug("Fitted VAR(1): k=%d, N=%d", k, N)
    return VarFit(
        series_names=tuple(design.series_names),
        coefficients=params[1:].T.copy(),
        intercepts=params[0].copy(),
        residuals=residuals,
        fitted=fitted,
        sigma_u=0.5 * (sigma_u + sigma_u.T),
        zz_inv=0.5 * (zz_inv + zz_inv.T),
        df_resid=df_resid,
    )


def wald_statistic(fit: VarFit, rows: Sequence[int], cols: Sequence[int]) -> float:
    """Wald statistic for H0: coefficients[rows, cols] == 0 jointly."""
    rows, cols = list(rows), list(cols)
    theta = fit.coefficients[np.ix_(rows, cols)].ravel()
    sigma = fit.sigma_u[np.ix_(rows, rows)]
    gram = fit.zz_inv[np.ix_([c + 1 for c in cols], [c + 1 for c in cols])]
    cov = np.kron(sigma, gram)
    try:
        solved = np.linalg.solve(cov, theta)
    except np.linalg.LinAlgError as e:
        raise SingularityError(
            "coefficient covariance sub-block is singular",
            details={"restrictions": theta.size},
            cause=e,
        )
    if not np.all(np.isfinite(solved)):
        raise SingularityError(
            "coefficient covariance sub-block is singular",
            details={"restrictions": theta.size},
        )
    return float(theta @ solved)


def wald_block_test(fit: VarFit, partition: SetPartition, i: str, j: str) -> float:
    """p-value of the chi-square Wald test that set j does not Granger-cause set i."""
    index = {name: c for c, name in enumerate(fit.series_names)}
    rows = [index[s] for s in partition.members(i)]
    cols = [index[s] for s in partition.members(j)]
    statistic = wald_statistic(fit, rows, cols)
    p = float(stats.chi2.sf(statistic, df=len(rows) * len(cols)))
    logger.debug("Wald %s->%s: W=%.4f p=%.4f", j, i, statistic, p)
    return p


@dataclass(frozen=True)
class SeriesEdge:
    source: str
    target: str
    set_label: str
    coefficient: float
    standard_error: float
    p_value: float
    significant: bool


def within_set_edges(fit: VarFit, partition: SetPartition, alpha: float = 0.05) -> List[SeriesEdge]:
    """Single-coefficient Wald tests between every ordered pair of series of a set."""
    index = {name: c for c, name in enumerate(fit.series_names)}
    edges = []
    for label in partition.labels:
        members = partition.members(label)
        for source in members:
            for target in members:
                r, c = index[target], index[source]
                statistic = wald_statistic(fit, [r], [c])
                p = float(stats.chi2.sf(statistic, df=1))
                edges.append(
                    SeriesEdge(
                        source=source,
                        target=target,
                        set_label=label,
                        coefficient=float(fit.coefficients[r, c]),
                        standard_error=fit.standard_error(r, c),
                        p_value=p,
                        significant=p < alpha,
                    )
                )
    return edges
