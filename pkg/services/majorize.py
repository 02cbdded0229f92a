import logging
from typing import Optional

import numpy as np

from services.errors import EngineError
from services.symlinalg import SymMatrix, laplacian_from_pairs, sym_matmul

logger = logging.getLogger(__name__)


def distances(x: np.ndarray, iind, jind) -> np.ndarray:
    """Euclidean distances between rows iind[k] and jind[k] (1-based) of the configuration."""
    x = np.asarray(x, dtype=float)
    diff = x[np.asarray(iind) - 1] - x[np.asarray(jind) - 1]
    return np.sqrt(np.sum(diff * diff, axis=1))


def stress(dhat, dist, weights) -> float:
    """Explicitly normalized stress: sum of w * (dhat - d)**2, given sum(w * dhat**2) == 1."""
    r = np.asarray(dhat, dtype=float) - np.asarray(dist, dtype=float)
    return float(np.sum(np.asarray(weights, dtype=float) * r * r))


def build_b(dhat, dist, weights, iind, jind, n: int) -> SymMatrix:
    """B(X): off-diagonal -w*dhat/d, zero where d == 0, diagonal making rows sum to zero."""
    dist = np.asarray(dist, dtype=float)
    num = np.asarray(weights, dtype=float) * np.asarray(dhat, dtype=float)
    ratio = np.divide(num, dist, out=np.zeros_like(dist), where=dist > 0)
    return laplacian_from_pairs(iind, jind, ratio, n)


def guttman_step(x: np.ndarray, b: SymMatrix, vinv: Optional[SymMatrix] = None) -> np.ndarray:
    """
    One Guttman transform X <- V+ B(X) X.

    Without vinv the update is B(X) X / n, valid for complete unit-weight data.
    The result is re-centered to remove round-off drift.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if b.order != n:
        raise EngineError(f"B has order {b.order} but the configuration has {n} rows")
    if vinv is not None and vinv.order != n:
        raise EngineError(f"V+ has order {vinv.order} but the configuration has {n} rows")
    bx = sym_matmul(b, x)
    y = sym_matmul(vinv, bx) if vinv is not None else bx / n
    return y - y.mean(axis=0)
