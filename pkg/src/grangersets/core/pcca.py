"""
Partial canonical correlation between the present of a response set and the
lag of a predictor set, given the conditional covariance blocks.

The symmetric matrix

    A = C_ii^{-1/2} C_ij C_jj^{-1} C_ji C_ii^{-1/2}

carries the squared partial canonical correlations as its eigenvalues. Its
companion

    B = C_jj^{-1/2} C_ji C_ii^{-1} C_ij C_jj^{-1/2}

has the same nonzero spectrum and is only formed as a debug self-check.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np

from .lagcov import ConditionalCovariance
from ..utils.exceptions import SingularityError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
SYMMETRY_TOL = 1e-10
NULL_BLOCK_TOL = 1e-10
CLAMP_WARN = 1e-6
TIE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PccaResult:
    rho: float
    eigenvalues: np.ndarray
    a_vectors: np.ndarray  # columns: a_d, metric-normalized under C_ii
    b_vectors: np.ndarray  # columns: b_d, metric-normalized under C_jj
    a_whitened: np.ndarray  # unit-norm eigenvectors of A
    b_whitened: np.ndarray  # unit-norm eigenvectors of B
    response_names: Tuple[str, ...] = ()
    predictor_names: Tuple[str, ...] = ()

    @property
    def a1(self) -> np.ndarray:
        return self.a_vectors[:, 0]

    @property
    def b1(self) -> np.ndarray:
        return self.b_vectors[:, 0]


def inv_sqrt_sym(M: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Pseudo inverse square root of a symmetric PSD matrix.

    Eigenvalues below ``tol`` times the largest one are treated as zero.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError("inv_sqrt_sym needs a square matrix", details={"shape": M.shape})
    scale = max(abs(np.trace(M)), np.abs(M).max(initial=0.0))
    if np.abs(M - M.T).max(initial=0.0) > SYMMETRY_TOL * max(scale, 1.0):
        raise ValidationError("matrix is not symmetric", details={"shape": M.shape})

    eigvals, eigvecs = np.linalg.eigh(0.5 * (M + M.T))
    largest = eigvals.max(initial=0.0)
    if largest <= 0.0:
        raise SingularityError("all eigenvalues are below the threshold", details={"shape": M.shape})
    if eigvals.min() < -max(tol, 1e-8) * largest:
        raise ValidationError(
            "matrix is not positive semidefinite",
            details={"min_eigenvalue": float(eigvals.min()), "max_eigenvalue": float(largest)},
        )
    keep = eigvals > tol * largest
    inv_root = np.where(keep, 1.0 / np.sqrt(np.where(keep, eigvals, 1.0)), 0.0)
    R = (eigvecs * inv_root) @ eigvecs.T
    return 0.5 * (R + R.T)


def _check_block(C: np.ndarray, reference: Optional[float], side: str, names):
    trace = float(np.trace(C))
    floor = NULL_BLOCK_TOL * reference if reference else 0.0
    if trace <= floor or not np.any(np.abs(C) > 0):
        raise SingularityError(
            f"{side} block is numerically zero after partialization",
            details={"side": side, "series": ", ".join(names) or "-", "trace": trace},
        )


def canonical_matrices(cond: ConditionalCovariance, tol: float = DEFAULT_TOL):
    """The whitening factors and the symmetric matrices A and B."""
    _check_block(cond.C_ii, cond.reference_trace_ii, "response", cond.response_names)
    _check_block(cond.C_jj, cond.reference_trace_jj, "predictor", cond.predictor_names)
    R_i = inv_sqrt_sym(cond.C_ii, tol)
    R_j = inv_sqrt_sym(cond.C_jj, tol)
    K = R_i @ cond.C_ij @ R_j
    A = K @ K.T
    B = K.T @ K
    return R_i, R_j, K, 0.5 * (A + A.T), 0.5 * (B + B.T)


def _spectrum_check(A_vals: np.ndarray, B: np.ndarray, d: int):
    B_vals = np.sort(np.linalg.eigvalsh(B))[::-1][:d]
    gap = np.abs(A_vals[:d] - B_vals).max(initial=0.0)
    if gap > 1e-8:
        logger.warning("Spectra of A and B disagree by %.3g", gap)
    else:
        logger.debug("Spectra of A and B agree to %.3g", gap)


def _orient(vectors: np.ndarray, R_i: np.ndarray) -> np.ndarray:
    """Flip each whitened eigenvector so its a-vector's largest entry is positive."""
    out = vectors.copy()
    for d in range(out.shape[1]):
        a = R_i @ out[:, d]
        if a[np.argmax(np.abs(a))] < 0:
            out[:, d] = -out[:, d]
    return out


def _break_ties(values: np.ndarray, vectors: np.ndarray, R_i: np.ndarray):
    order = list(range(values.size))
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and abs(values[order[start]] - values[order[stop]]) <= TIE_TOL:
            stop += 1
        if stop - start > 1:
            group = order[start:stop]
            group.sort(key=lambda d: tuple(np.round(R_i @ vectors[:, d], 9)))
            order[start:stop] = group
        start = stop
    return values[order], vectors[:, order]


def _predictor_vectors(K: np.ndarray, a_white: np.ndarray, n: int) -> np.ndarray:
    """b_d is proportional to K^T e_d; null directions are completed
    with an orthonormal basis of the remaining whitened space."""
    d_count = a_white.shape[1]
    b_white = np.zeros((n, d_count))
    for d in range(d_count):
        f = K.T @ a_white[:, d]
        norm = np.linalg.norm(f)
        if norm > NULL_BLOCK_TOL:
            b_white[:, d] = f / norm
    filled = [d for d in range(d_count) if np.any(b_white[:, d])]
    missing = [d for d in range(d_count) if d not in filled]
    if missing:
        basis = b_white[:, filled]
        for d in missing:
            for e in np.eye(n):
                v = e - basis @ (basis.T @ e) if basis.size else e
                if np.linalg.norm(v) > 1e-6:
                    v = v / np.linalg.norm(v)
                    b_white[:, d] = v
                    basis = np.column_stack([basis, v]) if basis.size else v[:, None]
                    break
    return b_white


def _metric_normalize(vectors: np.ndarray, C: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for d in range(out.shape[1]):
        norm2 = float(out[:, d] @ C @ out[:, d])
        if norm2 > 0:
            out[:, d] /= np.sqrt(norm2)
    return out


def solve_pcca(cond: ConditionalCovariance, tol: float = DEFAULT_TOL) -> PccaResult:
    R_i, R_j, K, A, B = canonical_matrices(cond, tol)
    m, n = A.shape[0], B.shape[0]
    d_count = min(m, n)

    eigvals, eigvecs = np.linalg.eigh(A)
    order = np.argsort(eigvals)[::-1][:d_count]
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]

    if logger.isEnabledFor(logging.DEBUG):
        _spectrum_check(eigvals, B, d_count)

    if eigvals.max(initial=0.0) > 1.0 + CLAMP_WARN:
        logger.warning(
            "Squared canonical correlation %.9f exceeds 1; the conditional "
            "covariance is badly conditioned",
            eigvals.max(),
        )
    eigvals = np.clip(eigvals, 0.0, 1.0)

    eigvecs = _orient(eigvecs, R_i)
    eigvals, eigvecs = _break_ties(eigvals, eigvecs, R_i)

    b_white = _predictor_vectors(K, eigvecs, n)
    a_vectors = _metric_normalize(R_i @ eigvecs, cond.C_ii)
    b_vectors = _metric_normalize(R_j @ b_white, cond.C_jj)

    eigvals.setflags(write=False)
    return PccaResult(
        rho=float(np.sqrt(eigvals[0])),
        eigenvalues=eigvals,
        a_vectors=a_vectors,
        b_vectors=b_vectors,
        a_whitened=eigvecs,
        b_whitened=b_white,
        response_names=cond.response_names,
        predictor_names=cond.predictor_names,
    )


def canonical_rho(cond: ConditionalCovariance, tol: float = DEFAULT_TOL) -> float:
    """Largest partial canonical correlation only; the bootstrap hot path."""
    _, _, K, _, _ = canonical_matrices(cond, tol)
    s = np.linalg.svd(K, compute_uv=False)
    return float(min(max(s[0], 0.0), 1.0)) if s.size else 0.0


@dataclass(frozen=True)
class Loading:
    series: str
    side: str  # "response" or "predictor"
    weight: float
    rank: int


@dataclass(frozen=True)
class LoadingRelation:
    first: str
    second: str
    relation: str  # "direct" or "inverse"


@dataclass(frozen=True)
class LoadingReport:
    rho: float
    response: Tuple[Loading, ...]
    predictor: Tuple[Loading, ...]
    relations: Tuple[LoadingRelation, ...]

    def dominant(self, side: str = "response") -> Optional[Loading]:
        loadings = self.response if side == "response" else self.predictor
        return loadings[0] if loadings else None


def _rank(names: Sequence[str], weights: np.ndarray, side: str) -> List[Loading]:
    rows = sorted(zip(names, weights), key=lambda nw: (-round(abs(nw[1]), 12), nw[0]))
    return [
        Loading(series=name, side=side, weight=float(w), rank=r)
        for r, (name, w) in enumerate(rows, start=1)
    ]


def canonical_loadings(result: PccaResult) -> LoadingReport:
    """First-pair canonical weights ranked by magnitude, with the sign relation
    between every pair of series that carries a nonzero weight."""
    m, n = result.a_vectors.shape[0], result.b_vectors.shape[0]
    response_names = result.response_names or tuple(f"y{r + 1}" for r in range(m))
    predictor_names = result.predictor_names or tuple(f"x{c + 1}" for c in range(n))

    response = _rank(response_names, result.a1, "response")
    predictor = _rank(predictor_names, result.b1, "predictor")

    weighted = [l for l in response + predictor if abs(l.weight) > TIE_TOL]
    relations = []
    for p in range(len(weighted)):
        for q in range(p + 1, len(weighted)):
            first, second = weighted[p], weighted[q]
            same = np.sign(first.weight) == np.sign(second.weight)
            relations.append(
                LoadingRelation(first.series, second.series, "direct" if same else "inverse")
            )
    return LoadingReport(
        rho=result.rho,
        response=tuple(response),
        predictor=tuple(predictor),
        relations=tuple(relations),
    )
