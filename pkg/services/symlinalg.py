"""
Dense symmetric linear algebra on packed lower triangles.

A SymMatrix of order n stores the n(n+1)/2 elements on and below the diagonal in
row-major order: (0,0), (1,0), (1,1), (2,0), ... Products, centering and the
Moore-Penrose inverse of V work on that vector directly.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from config import JACOBI_MAX_SWEEPS, JACOBI_TOLERANCE, PIVOT_TOLERANCE
from models import MDSData
from services.errors import EigenConvergenceError, ReducibleWeightsError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def _packed_indices(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row index, column index and off-diagonal mask of every packed position."""
    rows, cols = np.tril_indices(n)
    off = rows != cols
    for a in (rows, cols, off):
        a.setflags(write=False)
    return rows, cols, off


@lru_cache(maxsize=32)
def _column_positions(n: int, k: int) -> np.ndarray:
    """Packed positions of the elements (i, k), i = 0..n-1."""
    i = np.arange(n)
    pos = np.where(i >= k, i * (i + 1) // 2 + k, k * (k + 1) // 2 + i)
    pos.setflags(write=False)
    return pos


def packed_position(i: int, j: int) -> int:
    a, b = max(i, j), min(i, j)
    return a * (a + 1) // 2 + b


@dataclass(frozen=True)
class SymMatrix:
    order: int
    lower: np.ndarray

    def __post_init__(self):
        expected = self.order * (self.order + 1) // 2
        if self.lower.shape != (expected,):
            raise ValueError(f"order {self.order} needs {expected} packed elements, got {self.lower.shape}")

    @classmethod
    def from_dense(cls, a: np.ndarray) -> "SymMatrix":
        a = np.asarray(a, dtype=float)
        rows, cols, _ = _packed_indices(a.shape[0])
        return cls(a.shape[0], a[rows, cols].copy())

    def to_dense(self) -> np.ndarray:
        rows, cols, _ = _packed_indices(self.order)
        a = np.zeros((self.order, self.order))
        a[rows, cols] = self.lower
        a[cols, rows] = self.lower
        return a

    def diagonal(self) -> np.ndarray:
        i = np.arange(self.order)
        return self.lower[i * (i + 3) // 2]

    def row_sums(self) -> np.ndarray:
        rows, cols, off = _packed_indices(self.order)
        n = self.order
        return np.bincount(rows, self.lower, n) + np.bincount(cols[off], self.lower[off], n)


@dataclass(frozen=True)
class EigenPairs:
    values: np.ndarray
    vectors: np.ndarray


def sym_matmul(a: SymMatrix, x: np.ndarray) -> np.ndarray:
    """A @ X for packed symmetric A and dense n x p X, reading each stored element once."""
    x = np.asarray(x, dtype=float)
    n = a.order
    if x.shape[0] != n:
        raise ValueError(f"cannot multiply order {n} matrix with {x.shape[0]} rows")
    rows, cols, off = _packed_indices(n)
    r, c, v = rows[off], cols[off], a.lower[off]
    y = a.diagonal()[:, None] * x
    for s in range(x.shape[1]):
        y[:, s] += np.bincount(r, v * x[c, s], n) + np.bincount(c, v * x[r, s], n)
    return y


def laplacian_from_pairs(iind: Sequence[int], jind: Sequence[int], values: Sequence[float], n: int) -> SymMatrix:
    """Doubly centered matrix with -values[k] at (iind[k], jind[k]) (1-based) and zero row sums."""
    iind = np.asarray(iind) - 1
    jind = np.asarray(jind) - 1
    hi, lo = np.maximum(iind, jind), np.minimum(iind, jind)
    lower = np.zeros(n * (n + 1) // 2)
    np.add.at(lower, hi * (hi + 1) // 2 + lo, -np.asarray(values, dtype=float))
    rows, cols, off = _packed_indices(n)
    # diagonal is the negated off-diagonal row sum, so rows sum to zero
    offsums = np.bincount(rows[off], lower[off], n) + np.bincount(cols[off], lower[off], n)
    i = np.arange(n)
    lower[i * (i + 3) // 2] = -offsums
    return SymMatrix(n, lower)


def build_v(data: MDSData) -> SymMatrix:
    """V with off-diagonal -w_k for each observation and zero row sums."""
    return laplacian_from_pairs(data.iind, data.jind, data.weights, data.nobj)


def check_irreducible(data: MDSData) -> Optional[List[List[int]]]:
    """None when the observation graph connects all objects, else its components (1-based)."""
    n = data.nobj
    graph = coo_matrix(
        (np.ones(data.ndat), (np.asarray(data.iind) - 1, np.asarray(data.jind) - 1)),
        shape=(n, n),
    )
    ncomp, labels = connected_components(graph, directed=False)
    if ncomp == 1:
        return None
    components = [(np.flatnonzero(labels == c) + 1).tolist() for c in range(ncomp)]
    components.sort(key=lambda comp: comp[0])
    logger.debug(f"Observation graph has {ncomp} components")
    return components


def mp_inverse_v(v: SymMatrix) -> SymMatrix:
    """
    Moore-Penrose inverse of a doubly centered irreducible V.

    Uses V+ = (V + ee'/n)^-1 - ee'/n, inverting the shifted matrix by symmetric
    sweeping on the packed triangle. After sweeping every pivot the triangle holds
    minus the inverse.

    Raises:
        ReducibleWeightsError: a pivot falls below the tolerance, which happens
            when V + ee'/n is singular, i.e. the weights are reducible.
    """
    n = v.order
    shift = 1.0 / n
    a = v.lower + shift
    rows, cols, _ = _packed_indices(n)
    tol = PIVOT_TOLERANCE * np.max(np.abs(SymMatrix(n, a).diagonal()))
    for k in range(n):
        pos = _column_positions(n, k)
        d = a[pos[k]]
        if d <= tol:
            raise ReducibleWeightsError(
                f"V + ee'/n is numerically singular at pivot {k + 1} ({d:.3e}); weights are reducible"
            )
        col = a[pos].copy()
        a -= col[rows] * col[cols] / d
        a[pos] = col / d
        a[pos[k]] = -1.0 / d
    return SymMatrix(n, -a - shift)


def double_center(a: SymMatrix) -> SymMatrix:
    """-1/2 J A J with J the centering matrix."""
    n = a.order
    rows, cols, _ = _packed_indices(n)
    means = a.row_sums() / n
    grand = means.mean()
    return SymMatrix(n, -0.5 * (a.lower - means[rows] - means[cols] + grand))


def _jacobi(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi on a dense symmetric matrix: all eigenvalues and orthonormal eigenvectors."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    vectors = np.eye(n)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    for sweep in range(JACOBI_MAX_SWEEPS + 1):
        # from the strict upper triangle; sum(a^2) - sum(diag^2) cancels near convergence
        off = np.sqrt(2.0) * np.linalg.norm(np.triu(a, 1))
        if off <= JACOBI_TOLERANCE * scale:
            logger.debug(f"Jacobi converged after {sweep} sweeps on order {n}")
            return np.diag(a).copy(), vectors
        if sweep == JACOBI_MAX_SWEEPS:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                vectors[:, idx] = vectors[:, idx] @ rot
    raise EigenConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (order {n})")


def top_eigen(a: SymMatrix, k: int) -> EigenPairs:
    """
    The k algebraically largest eigenvalues, descending, with orthonormal eigenvectors.

    Each eigenvector is signed so that its first nonzero component is positive.
    """
    if not 1 <= k <= a.order:
        raise ValueError(f"k must be in 1..{a.order}, got {k}")
    values, vectors = _jacobi(a.to_dense())
    order = np.argsort(-values, kind="stable")[:k]
    values, vectors = values[order], vectors[:, order]
    for s in range(k):
        v = vectors[:, s]
        nonzero = np.flatnonzero(np.abs(v) > 1e-12 * np.max(np.abs(v)))
        if v[nonzero[0]] < 0:
            vectors[:, s] = -v
    return EigenPairs(values=values, vectors=vectors)
