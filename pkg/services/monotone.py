"""
Monotone regression and the three approaches to ties.

All approaches fit disparities (dhat) to the current distances under the order
of the dissimilarities and then normalize them to sum(w * dhat**2) == 1.
"""
import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict

import numpy as np

from services.errors import DegenerateTransformError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransformState:
    """
    Disparities with the index and weight vectors they are aligned with.

    Under the primary approach iind, jind, weights and dist are permuted within
    tie blocks; blocks (and the delta vector they describe) never move.
    """
    dhat: np.ndarray
    dist: np.ndarray
    iind: np.ndarray
    jind: np.ndarray
    weights: np.ndarray
    blocks: np.ndarray

    @property
    def block_ids(self) -> np.ndarray:
        return np.cumsum(self.blocks > 0) - 1


def pava(targets, weights) -> np.ndarray:
    """
    Weighted least squares monotone (non-decreasing) regression.

    Pool-adjacent-violators with a stack of blocks; each element is pushed once and
    merged at most once, so the cost is linear in the length.
    """
    targets = np.asarray(targets, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if targets.shape != weights.shape:
        raise ValueError(f"targets {targets.shape} and weights {weights.shape} differ in shape")
    levels, totals, sizes = [], [], []
    for x, w in zip(targets.tolist(), weights.tolist()):
        size = 1
        while levels and levels[-1] > x:
            px, pw = levels.pop(), totals.pop()
            x = (px * pw + x * w) / (pw + w)
            w += pw
            size += sizes.pop()
        levels.append(x)
        totals.append(w)
        sizes.append(size)
    return np.repeat(levels, sizes)


def normalize_dhat(state: TransformState) -> TransformState:
    ssq = float(np.sum(state.weights * state.dhat ** 2))
    if ssq <= 0.0:
        raise DegenerateTransformError("disparities are all zero and cannot be normalized")
    return replace(state, dhat=state.dhat / np.sqrt(ssq))


def _block_means(state: TransformState, dist: np.ndarray):
    ids = state.block_ids
    block_weights = np.bincount(ids, state.weights)
    return ids, np.bincount(ids, state.weights * dist) / block_weights, block_weights


def primary_approach(state: TransformState, dist) -> TransformState:
    """Sort within tie blocks by distance, then monotone regression over the full vector."""
    dist = np.asarray(dist, dtype=float)
    # lexsort is stable: unchanged distances leave the order as it is
    order = np.lexsort((dist, state.block_ids))
    dist = dist[order]
    weights = state.weights[order]
    moved = replace(
        state,
        dist=dist,
        iind=state.iind[order],
        jind=state.jind[order],
        weights=weights,
        dhat=pava(dist, weights),
    )
    return normalize_dhat(moved)


def secondary_approach(state: TransformState, dist) -> TransformState:
    """Disparities constant within tie blocks: monotone regression of the block means."""
    dist = np.asarray(dist, dtype=float)
    ids, means, block_weights = _block_means(state, dist)
    fitted = pava(means, block_weights)
    return normalize_dhat(replace(state, dist=dist, dhat=fitted[ids]))


def tertiary_approach(state: TransformState, dist) -> TransformState:
    """Only block means are ordered; deviations from the block mean carry over."""
    dist = np.asarray(dist, dtype=float)
    ids, means, block_weights = _block_means(state, dist)
    fitted = pava(means, block_weights)
    dhat = dist - means[ids] + fitted[ids]
    clamped = dhat < 0
    if np.any(clamped):
        logger.debug(f"Tertiary approach clamped {int(clamped.sum())} negative disparities")
        dhat = np.where(clamped, 0.0, dhat)
    return normalize_dhat(replace(state, dist=dist, dhat=dhat))


TIE_APPROACHES: Dict[int, Callable[[TransformState, np.ndarray], TransformState]] = {
    1: primary_approach,
    2: secondary_approach,
    3: tertiary_approach,
}
