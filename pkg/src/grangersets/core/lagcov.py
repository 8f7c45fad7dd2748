"""
Covariance blocks among the present values of the response set, the lagged
values of the predictor set, and the lagged conditioning columns X, and their
conditional (partialized) form via Schur complements.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple
import logging

import numpy as np

from .panel import LaggedDesign, SetPartition
from ..utils.exceptions import RankDeficiencyError, SingularityError, ValidationError

logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-10
PINV_CUTOFF = 1e-12
RIDGE_SCALE = 1e-8
# variance below this fraction of the largest conditioning variance counts as zero
ZERO_VARIANCE = 1e-14


@dataclass(frozen=True)
class ConditioningRule:
    """Which lagged columns enter X besides the complement of the predictor set."""

    include_unassigned: bool = True


@dataclass(frozen=True, eq=False)
class BlockCovariance:
    S_ii: np.ndarray
    S_ij: np.ndarray
    S_ix: np.ndarray
    S_jj: np.ndarray
    S_jx: np.ndarray
    S_xx: np.ndarray
    response_names: Tuple[str, ...] = ()
    predictor_names: Tuple[str, ...] = ()
    conditioning_names: Tuple[str, ...] = ()

    @property
    def m(self) -> int:
        return self.S_ii.shape[0]

    @property
    def n(self) -> int:
        return self.S_jj.shape[0]

    @property
    def q(self) -> int:
        return self.S_xx.shape[0]

    def assembled(self) -> np.ndarray:
        """The full (m+n+q) square matrix in response/predictor/conditioning order."""
        return np.block(
            [
                [self.S_ii, self.S_ij, self.S_ix],
                [self.S_ij.T, self.S_jj, self.S_jx],
                [self.S_ix.T, self.S_jx.T, self.S_xx],
            ]
        )


@dataclass(frozen=True, eq=False)
class ConditionalCovariance:
    C_ii: np.ndarray
    C_ij: np.ndarray
    C_ji: np.ndarray
    C_jj: np.ndarray
    response_names: Tuple[str, ...] = ()
    predictor_names: Tuple[str, ...] = ()
    # unconditional traces, used to tell "small" from "numerically zero"
    reference_trace_ii: Optional[float] = None
    reference_trace_jj: Optional[float] = None

    @classmethod
    def from_blocks(cls, C_ii, C_ij, C_jj, **kwargs) -> "ConditionalCovariance":
        C_ij = np.asarray(C_ij, dtype=np.float64)
        return cls(
            C_ii=np.asarray(C_ii, dtype=np.float64),
            C_ij=C_ij,
            C_ji=C_ij.T.copy(),
            C_jj=np.asarray(C_jj, dtype=np.float64),
            **kwargs,
        )


def sample_cov(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Centered cross-product of the columns of U and V divided by N - 1."""
    U = np.asarray(U, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    if U.ndim == 1:
        U = U[:, None]
    if V.ndim == 1:
        V = V[:, None]
    if U.shape[0] != V.shape[0]:
        raise ValidationError(
            "sample_cov needs equal row counts",
            details={"U_rows": U.shape[0], "V_rows": V.shape[0]},
        )
    N = U.shape[0]
    if N < 2:
        raise ValidationError("sample_cov needs at least two rows", details={"N": N})
    Uc = U - U.mean(axis=0)
    Vc = V - V.mean(axis=0)
    return Uc.T @ Vc / (N - 1)


def _symmetrize(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def conditioning_columns(
    design: LaggedDesign,
    partition: SetPartition,
    j: str,
    rule: ConditioningRule = ConditioningRule(),
) -> Tuple[str, ...]:
    """X: every lagged series outside the predictor set j (and outside the
    partition altogether only when ``rule.include_unassigned``)."""
    predictors = set(partition.members(j))
    names = []
    for series in design.series_names:
        if series in predictors:
            continue
        if series not in partition.assignments and not rule.include_unassigned:
            continue
        names.append(series)
    return tuple(names)


def covariance_from_columns(
    present_i: np.ndarray,
    lagged_j: np.ndarray,
    lagged_x: np.ndarray,
    response_names: Sequence[str] = (),
    predictor_names: Sequence[str] = (),
    conditioning_names: Sequence[str] = (),
) -> BlockCovariance:
    m = present_i.shape[1]
    n = lagged_j.shape[1]
    full = sample_cov(
        np.hstack([present_i, lagged_j, lagged_x]),
        np.hstack([present_i, lagged_j, lagged_x]),
    )
    full = _symmetrize(full)
    i_sl = slice(0, m)
    j_sl = slice(m, m + n)
    x_sl = slice(m + n, None)
    return BlockCovariance(
        S_ii=full[i_sl, i_sl],
        S_ij=full[i_sl, j_sl],
        S_ix=full[i_sl, x_sl],
        S_jj=full[j_sl, j_sl],
        S_jx=full[j_sl, x_sl],
        S_xx=full[x_sl, x_sl],
        response_names=tuple(response_names),
        predictor_names=tuple(predictor_names),
        conditioning_names=tuple(conditioning_names),
    )


def assemble_blocks(
    design: LaggedDesign,
    partition: SetPartition,
    i: str,
    j: str,
    conditioning: ConditioningRule = ConditioningRule(),
) -> BlockCovariance:
    """Covariance blocks for testing whether set j Granger-causes set i."""
    response = partition.members(i)
    predictors = partition.members(j)
    conditioners = conditioning_columns(design, partition, j, conditioning)

    N = design.n_rows
    q = len(conditioners)
    if q >= N - 1:
        raise RankDeficiencyError(
            "too many conditioning columns for the number of aligned rows; "
            "use fewer conditioning series or a longer time series",
            details={"q": q, "rows": N, "pair": f"{j}->{i}"},
        )

    i_cols = design.column_indices(response)
    j_cols = design.column_indices(predictors)
    x_cols = design.column_indices(conditioners)
    blocks = covariance_from_columns(
        design.present[:, i_cols],
        design.lagged[:, j_cols],
        design.lagged[:, x_cols],
        response,
        predictors,
        conditioners,
    )
    logger.debug("Assembled blocks %s->%s: m=%d n=%d q=%d", j, i, blocks.m, blocks.n, q)
    return blocks


def _pinv_sym(M: np.ndarray, cutoff: float = PINV_CUTOFF) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(_symmetrize(M))
    largest = eigvals.max() if eigvals.size else 0.0
    keep = eigvals > cutoff * largest
    inv = np.where(keep, 1.0 / np.where(keep, eigvals, 1.0), 0.0)
    return (eigvecs * inv) @ eigvecs.T


def _zero_variance_columns(blocks: BlockCovariance) -> Tuple[str, ...]:
    diag = np.diag(blocks.S_xx)
    scale = max(diag.max(), 0.0)
    flat = np.nonzero(diag <= ZERO_VARIANCE * scale)[0] if scale > 0 else np.arange(diag.size)
    names = blocks.conditioning_names or tuple(f"x{c}" for c in range(diag.size))
    return tuple(names[c] for c in flat)


def conditional_cov(
    blocks: BlockCovariance,
    ridge: Optional[float] = None,
) -> ConditionalCovariance:
    """Schur complements of S_xx in the assembled covariance.

    ``ridge`` is added to the diagonal of S_xx before inversion; ``None``
    means ``1e-8 * trace(S_xx) / q``.
    """
    reference = {
        "response_names": blocks.response_names,
        "predictor_names": blocks.predictor_names,
        "reference_trace_ii": float(np.trace(blocks.S_ii)),
        "reference_trace_jj": float(np.trace(blocks.S_jj)),
    }
    if blocks.q == 0:
        return ConditionalCovariance.from_blocks(
            blocks.S_ii, blocks.S_ij, blocks.S_jj, **reference
        )

    if ridge is not None and ridge < 0:
        raise ValidationError("ridge must be non-negative", details={"ridge": ridge})

    flat = _zero_variance_columns(blocks)
    if flat:
        raise SingularityError(
            "conditioning covariance is singular: zero-variance columns",
            details={"columns": ", ".join(flat)},
        )

    S_xx = blocks.S_xx
    if ridge is None:
        ridge = RIDGE_SCALE * np.trace(S_xx) / blocks.q
    S_xx_inv = _pinv_sym(S_xx + ridge * np.eye(blocks.q))

    C_ii = _symmetrize(blocks.S_ii - blocks.S_ix @ S_xx_inv @ blocks.S_ix.T)
    C_ij = blocks.S_ij - blocks.S_ix @ S_xx_inv @ blocks.S_jx.T
    C_jj = _symmetrize(blocks.S_jj - blocks.S_jx @ S_xx_inv @ blocks.S_jx.T)
    return ConditionalCovariance.from_blocks(C_ii, C_ij, C_jj, **reference)


def partialize(
    design: LaggedDesign,
    partition: SetPartition,
    i: str,
    j: str,
    conditioning: ConditioningRule = ConditioningRule(),
    ridge: Optional[float] = None,
) -> ConditionalCovariance:
    return conditional_cov(assemble_blocks(design, partition, i, j, conditioning), ridge)
