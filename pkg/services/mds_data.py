"""
Flat MDS data structure for square symmetric dissimilarities.

Observations are stored as parallel vectors (iind, jind, delta, blocks, weights),
sorted by delta, with tie-blocks coded by their length at the first element of
each block. Missing cells never enter the structure.
"""
import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from models import DistTriangle, MDSData
from services.errors import MDSDataError

logger = logging.getLogger(__name__)


def triangle_size(nobj: int) -> int:
    return nobj * (nobj - 1) // 2


def triangle_position(i: int, j: int) -> int:
    """0-based position of the 1-based cell (i, j), i != j, in a row-major lower triangle."""
    a, b = max(i, j), min(i, j)
    return (a - 1) * (a - 2) // 2 + (b - 1)


def tie_blocks(delta: Sequence[float]) -> np.ndarray:
    """Block codes for a sorted vector: block length at each block start, 0 elsewhere."""
    delta = np.asarray(delta, dtype=float)
    m = len(delta)
    blocks = np.zeros(m, dtype=int)
    if m == 0:
        return blocks
    starts = np.flatnonzero(np.r_[True, delta[1:] != delta[:-1]])
    blocks[starts] = np.diff(np.r_[starts, m])
    return blocks


def _triangle_array(triangle: DistTriangle, what: str) -> np.ndarray:
    if triangle.nobj < 2:
        raise MDSDataError(f"{what}: need at least 2 objects, got {triangle.nobj}")
    expected = triangle_size(triangle.nobj)
    if len(triangle.values) != expected:
        raise MDSDataError(
            f"{what}: {triangle.nobj} objects need {expected} lower-triangle values, got {len(triangle.values)}"
        )
    return np.array([np.nan if v is None else v for v in triangle.values], dtype=float)


def make_mds_data(delta: DistTriangle, weights: Optional[DistTriangle] = None) -> MDSData:
    """
    Build the flat MDS data structure from a dissimilarity triangle and optional weights.

    Missing dissimilarities, missing weights and zero weights drop the observation.
    The rest is sorted by delta; equal deltas keep the column-major order of the
    lower triangle, which is the order of a stable sort of an R dist object.

    Raises:
        MDSDataError: fewer than two objects, mismatched triangles, negative values,
            or no observation left.
    """
    n = delta.nobj
    d = _triangle_array(delta, "delta")
    if weights is not None:
        if weights.nobj != n:
            raise MDSDataError(f"weights have {weights.nobj} objects, delta has {n}")
        w = _triangle_array(weights, "weights")
    else:
        w = np.ones_like(d)

    if np.any(d[~np.isnan(d)] < 0):
        raise MDSDataError("negative dissimilarity in delta")
    if np.any(w[~np.isnan(w)] < 0):
        raise MDSDataError("negative weight in weights")

    rows, cols = np.tril_indices(n, k=-1)
    keep = ~np.isnan(d) & ~np.isnan(w) & (w > 0)
    if not np.any(keep):
        raise MDSDataError("no observations: every cell is missing or has zero weight")

    iind, jind, dk, wk = rows[keep] + 1, cols[keep] + 1, d[keep], w[keep]
    order = np.lexsort((iind, jind, dk))
    iind, jind, dk, wk = iind[order], jind[order], dk[order], wk[order]

    data = MDSData(
        iind=iind.tolist(),
        jind=jind.tolist(),
        delta=dk.tolist(),
        blocks=tie_blocks(dk).tolist(),
        weights=wk.tolist(),
        nobj=n,
        ndat=len(dk),
    )
    logger.info(
        f"Built MDS data: {n} objects, {data.ndat} of {triangle_size(n)} observations, "
        f"{int(np.count_nonzero(data.blocks))} tie blocks"
    )
    return data


def from_mds_data(data: MDSData) -> Tuple[DistTriangle, DistTriangle]:
    """Inverse of make_mds_data: unobserved cells come back as missing delta with weight 0."""
    size = triangle_size(data.nobj)
    values: List[Optional[float]] = [None] * size
    weights: List[float] = [0.0] * size
    for i, j, d, w in zip(data.iind, data.jind, data.delta, data.weights):
        pos = triangle_position(i, j)
        values[pos] = d
        weights[pos] = w
    return (
        DistTriangle(nobj=data.nobj, values=values),
        DistTriangle(nobj=data.nobj, values=weights),
    )


def validate(data: MDSData) -> List[str]:
    """Check every invariant of the data structure. Returns all violations; empty means valid."""
    violations = []
    m = data.ndat
    if m < 1:
        violations.append("no observations")
    if data.nobj < 2:
        violations.append(f"nobj must be at least 2, got {data.nobj}")
    for name in ("iind", "jind", "delta", "blocks", "weights"):
        length = len(getattr(data, name))
        if length != m:
            violations.append(f"{name} has length {length}, ndat is {m}")
    if violations:
        return violations

    iind = np.asarray(data.iind)
    jind = np.asarray(data.jind)
    delta = np.asarray(data.delta, dtype=float)
    weights = np.asarray(data.weights, dtype=float)
    blocks = np.asarray(data.blocks)

    out_of_range = (iind < 1) | (iind > data.nobj) | (jind < 1) | (jind > data.nobj)
    if np.any(out_of_range):
        violations.append(f"index out of range 1..{data.nobj} at positions {np.flatnonzero(out_of_range).tolist()}")
    if np.any(iind == jind):
        violations.append(f"diagonal pair at positions {np.flatnonzero(iind == jind).tolist()}")

    seen = {}
    for k, (i, j) in enumerate(zip(data.iind, data.jind)):
        pair = (max(i, j), min(i, j))
        if pair in seen:
            violations.append(f"duplicate pair ({pair[0]},{pair[1]}) at positions {seen[pair]} and {k}")
        else:
            seen[pair] = k

    if not np.all(np.isfinite(delta)) or np.any(delta < 0):
        violations.append("delta must be finite and non-negative")
    if np.any(np.diff(delta) < 0):
        violations.append("delta not sorted")
    elif not np.array_equal(blocks, tie_blocks(delta)):
        violations.append("blocks do not match the ties in delta")
    if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
        violations.append("weights must be finite and strictly positive")
    return violations


def read_dist_file(source: Union[str, Path, TextIO]) -> DistTriangle:
    """
    Parse a lower-triangle text file.

    Row k holds the k values for object k+1 against objects 1..k, separated by
    whitespace. 'NA' (any case) marks a missing value, lines starting with '#'
    are comments.
    """
    name = getattr(source, "name", "<stream>") if hasattr(source, "read") else str(source)
    try:
        if hasattr(source, "read"):
            text = source.read()
        else:
            with open(source, "r", encoding="utf-8") as f:
                text = f.read()
    except UnicodeDecodeError as e:
        raise MDSDataError(f"{name}: not a UTF-8 text file ({e.reason} at byte {e.start})") from e

    values: List[Optional[float]] = []
    nrows = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        nrows += 1
        if len(tokens) != nrows:
            raise MDSDataError(f"{name}:{lineno}: ragged triangle, row {nrows} has {len(tokens)} values")
        for token in tokens:
            if token.upper() == "NA":
                values.append(None)
                continue
            try:
                value = float(token)
            except ValueError:
                raise MDSDataError(f"{name}:{lineno}: non-numeric token '{token}'")
            if not math.isfinite(value):
                raise MDSDataError(f"{name}:{lineno}: non-finite value '{token}'")
            values.append(value)

    if nrows == 0:
        raise MDSDataError(f"{name}: no data rows")
    logger.debug(f"Read {len(values)} values for {nrows + 1} objects from {name}")
    return DistTriangle(nobj=nrows + 1, values=values)


def power_weights(delta: DistTriangle, power: float) -> DistTriangle:
    """Weights w = delta ** power on observed cells; zero deltas with a negative power get weight 0."""
    weights: List[Optional[float]] = []
    dropped = 0
    for value in delta.values:
        if value is None:
            weights.append(None)
        elif value == 0 and power < 0:
            weights.append(0.0)
            dropped += 1
        else:
            weights.append(float(value) ** power)
    if dropped:
        logger.warning(f"{dropped} zero dissimilarities get weight 0 under power {power} and are dropped")
    return DistTriangle(nobj=delta.nobj, values=weights)


def matrix_print(x, digits: int = 6, width: int = 8, fmt: str = "f", flag: str = "+") -> str:
    """Format a vector or matrix one row per line, every entry as '{flag}{width}.{digits}{fmt}'."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    spec = f"{flag}{width}.{digits}{fmt}"
    return "\n".join(" ".join(format(v, spec) for v in row) for row in x)
