"""
Initial configurations for the engine.

Every builder returns an InitResult that carries the same fields the plots read
from an MDSResult. Torgerson and Guttman starts report sstress (squared distances
against squared dissimilarities); the full-dimensional and random starts report
stress against the normalized dissimilarities.
"""
import logging
from typing import List, Optional

import numpy as np

from config import DEFAULT_SEED, EIGEN_ZERO
from models import EngineConfig, InitResult, MDSData
from services.errors import MDSDataError
from services.majorize import distances, stress
from services.symlinalg import SymMatrix, double_center, laplacian_from_pairs, top_eigen

logger = logging.getLogger(__name__)


def sstress(data: MDSData, x: np.ndarray) -> float:
    """sum w (delta^2 - d^2)^2 / sum w delta^4 over the observed pairs."""
    delta2 = np.asarray(data.delta, dtype=float) ** 2
    w = np.asarray(data.weights, dtype=float)
    den = float(np.sum(w * delta2 ** 2))
    if den <= 0.0:
        raise MDSDataError("sstress is undefined when all dissimilarities are zero")
    d2 = distances(x, data.iind, data.jind) ** 2
    return float(np.sum(w * (delta2 - d2) ** 2)) / den


def _check_ndim(data: MDSData, ndim: int):
    if not 1 <= ndim < data.nobj:
        raise MDSDataError(f"ndim must be in 1..{data.nobj - 1} for {data.nobj} objects, got {ndim}")


def _spectral_conf(b: SymMatrix, ndim: int):
    """K L^(1/2) for the top ndim eigenpairs; eigenvalues that are zero up to round-off count as zero."""
    eig = top_eigen(b, ndim)
    scale = max(float(np.max(np.abs(eig.values))), np.finfo(float).tiny)
    values = np.where(eig.values > EIGEN_ZERO * scale, eig.values, 0.0)
    conf = eig.vectors * np.sqrt(values)
    return conf - conf.mean(axis=0), values


def _sstress_result(method: str, conf: np.ndarray, data: MDSData, warnings: Optional[List[str]] = None) -> InitResult:
    return InitResult(
        method=method,
        quality=sstress(data, conf),
        quality_kind="sstress",
        conf=conf.tolist(),
        delta=data.delta,
        dhat=data.delta,
        confdist=distances(conf, data.iind, data.jind).tolist(),
        weightmat=data.weights,
        iind=data.iind,
        jind=data.jind,
        nobj=data.nobj,
        ndim=conf.shape[1],
        warnings=warnings or [],
    )


def torgerson(data: MDSData, ndim: int) -> InitResult:
    """
    Classical scaling with every unobserved cell imputed by the mean observed dissimilarity.

    Columns belonging to negative eigenvalues are zero, so the start can have a
    lower rank than ndim; this is reported in the warnings of the result.
    """
    _check_ndim(data, ndim)
    n = data.nobj
    delta = np.asarray(data.delta, dtype=float)
    fill = float(delta.mean())

    squared = np.full((n, n), fill * fill)
    np.fill_diagonal(squared, 0.0)
    i, j = np.asarray(data.iind) - 1, np.asarray(data.jind) - 1
    squared[i, j] = squared[j, i] = delta ** 2
    if data.ndat < n * (n - 1) // 2:
        logger.info(f"Torgerson start imputes {n * (n - 1) // 2 - data.ndat} missing cells with {fill:.6g}")

    conf, values = _spectral_conf(double_center(SymMatrix.from_dense(squared)), ndim)
    warnings = []
    npos = int(np.sum(values > 0))
    if npos < ndim:
        message = f"only {npos} positive eigenvalues for {ndim} dimensions; start has dimension {npos}"
        logger.warning(f"Torgerson: {message}")
        warnings.append(message)
    return _sstress_result("torgerson", conf, data, warnings)


def guttman_init(data: MDSData, ndim: int) -> InitResult:
    """
    Guttman-Lingoes start: dominant eigenvectors of B with off-diagonal -w*delta^2.

    B is the Laplacian of non-negative edge values and therefore positive
    semi-definite; missing cells simply contribute nothing. The solution K*L^(1/2)
    is rescaled to the factor minimizing sstress.
    """
    _check_ndim(data, ndim)
    w = np.asarray(data.weights, dtype=float)
    delta2 = np.asarray(data.delta, dtype=float) ** 2
    b = laplacian_from_pairs(data.iind, data.jind, w * delta2, data.nobj)
    conf, _ = _spectral_conf(b, ndim)

    d2 = distances(conf, data.iind, data.jind) ** 2
    den = float(np.sum(w * d2 * d2))
    if den > 0:
        # d^2 scales with c^2; the sstress-optimal c^2 is sum(w delta^2 d^2) / sum(w d^4)
        conf = conf * np.sqrt(float(np.sum(w * delta2 * d2)) / den)
    return _sstress_result("guttman", conf, data)


def full_dim_init(data: MDSData, ndim: int, weighted: bool = False) -> InitResult:
    """Principal components of the metric solution in n-1 dimensions, truncated to ndim."""
    from services.engine import SmacofEngine

    n = data.nobj
    if n < 3:
        raise MDSDataError(f"full-dimensional start needs at least 3 objects, got {n}")
    _check_ndim(data, ndim)

    full = SmacofEngine(EngineConfig(ndim=n - 1, weighted=weighted)).run(data)
    x = np.asarray(full.conf)
    eig = top_eigen(SymMatrix.from_dense(x.T @ x), ndim)
    conf = x @ eig.vectors
    conf -= conf.mean(axis=0)

    confdist = distances(conf, full.iind, full.jind)
    quality = stress(full.dhat, confdist, full.weightmat)
    logger.info(f"Full-dimensional stress {full.stress:.8f} after {full.niter} iterations, truncated to {ndim}: {quality:.8f}")
    return InitResult(
        method="fulldim",
        quality=quality,
        quality_kind="stress",
        conf=conf.tolist(),
        delta=full.delta,
        dhat=full.dhat,
        confdist=confdist.tolist(),
        weightmat=full.weightmat,
        iind=full.iind,
        jind=full.jind,
        nobj=n,
        ndim=ndim,
    )


def random_init(data: MDSData, ndim: int, seed: int = DEFAULT_SEED, weighted: bool = False) -> InitResult:
    """
    Uniform(-0.5, 0.5) coordinates from a seeded PCG64 generator, centered.

    quality is the stress of the start under the same weighting as the fit:
    data.weights when weighted, unit weights otherwise.
    """
    if ndim < 1:
        raise MDSDataError(f"ndim must be positive, got {ndim}")
    rng = np.random.Generator(np.random.PCG64(seed))
    conf = rng.uniform(-0.5, 0.5, size=(data.nobj, ndim))
    conf -= conf.mean(axis=0)

    w = np.asarray(data.weights, dtype=float) if weighted else np.ones(data.ndat)
    delta = np.asarray(data.delta, dtype=float)
    ssq = float(np.sum(w * delta ** 2))
    if ssq <= 0.0:
        raise MDSDataError("all dissimilarities are zero")
    dhat = delta / np.sqrt(ssq)
    confdist = distances(conf, data.iind, data.jind)
    return InitResult(
        method="random",
        quality=stress(dhat, confdist, w),
        quality_kind="stress",
        conf=conf.tolist(),
        delta=data.delta,
        dhat=dhat.tolist(),
        confdist=confdist.tolist(),
        weightmat=w.tolist(),
        iind=data.iind,
        jind=data.jind,
        nobj=data.nobj,
        ndim=ndim,
    )


INITIALIZERS = {
    "torgerson": torgerson,
    "guttman": guttman_init,
    "fulldim": full_dim_init,
    "random": random_init,
}
