"""
Random data builders shared by the test modules
"""
import numpy as np

from models import DistTriangle
from services.mds_data import make_mds_data, triangle_position, triangle_size


def random_triangle(rng, n, missing=0.0, decimals=None, low=1.0, high=2.0):
    """Dissimilarities uniform on (low, high); cells (i+1, i) are never missing so the data stay connected."""
    values = rng.uniform(low, high, size=triangle_size(n))
    if decimals is not None:
        values = np.round(values, decimals)
    values = values.tolist()
    if missing > 0:
        chain = {triangle_position(i + 1, i) for i in range(1, n)}
        for pos in range(len(values)):
            if pos not in chain and rng.uniform() < missing:
                values[pos] = None
    return DistTriangle(nobj=n, values=values)


def random_weights(rng, n, low=0.5, high=2.0):
    return DistTriangle(nobj=n, values=rng.uniform(low, high, size=triangle_size(n)).tolist())


def euclidean_triangle(conf):
    """Lower triangle of the exact distances between the rows of conf."""
    conf = np.asarray(conf, dtype=float)
    n = conf.shape[0]
    values = [float(np.linalg.norm(conf[i] - conf[j])) for i in range(1, n) for j in range(i)]
    return DistTriangle(nobj=n, values=values)


def random_data(rng, n, weighted=False, **options):
    delta = random_triangle(rng, n, **options)
    return make_mds_data(delta, random_weights(rng, n) if weighted else None)
