"""Ball-mass estimates of the dimension carried by a measure on a glued space."""
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from ..errors import ResolutionError, ValidationError
from ..glue import Block, Decoration, MeasureOnUlam, fused_graph
from ..ulam import ROOT


class DimensionEstimate(float):
    def __new__(cls, value, stderr, radii, log_mass):
        obj = super().__new__(cls, value)
        obj.stderr = stderr
        obj.radii = radii
        obj.log_mass = log_mass
        return obj


def uniform_point_measure(dec):
    """Copy of a finite decoration where every glued point gets the same mass,
    with the matching measure on addresses."""
    blocks = {}
    counts = {}
    for u in sorted(set(dec.addresses()) | {ROOT}):
        b = dec.block(u)
        m = np.ones(b.n_points)
        if u != ROOT:
            m[b.root] = 0.0
        counts[u] = m.sum()
        blocks[u] = Block(b.n_points, b.root, b.attach, m, edges=b.edges, matrix=b.matrix, validate=False)
    total = sum(counts.values())
    return Decoration(blocks), MeasureOnUlam({u: c / total for u, c in counts.items()})


def _discrete_measure(dec, measure):
    """(handles, masses) spreading each address atom over its block's points."""
    handles, masses = [], []
    for u, a in measure.atoms.items():
        if a <= 0:
            continue
        b = dec.block(u)
        if b.masses is not None and b.masses.sum() > 0:
            w = b.masses / b.masses.sum()
        else:
            w = np.ones(b.n_points)
            if u != ROOT and b.n_points > 1:
                w[b.root] = 0.0
            w /= w.sum()
        for i in np.nonzero(w)[0]:
            handles.append((u, int(i)))
            masses.append(a * w[i])
    return handles, np.asarray(masses)


def _min_graph(n, edges):
    """Sparse graph keeping the shortest copy of parallel edges (zero lengths kept tiny)."""
    e = np.array([(a, b, w) for a, b, w in edges if a != b], dtype=float).reshape(-1, 3)
    a = np.minimum(e[:, 0], e[:, 1]).astype(np.int64)
    b = np.maximum(e[:, 0], e[:, 1]).astype(np.int64)
    w = np.maximum(e[:, 2], 1e-300)
    order = np.lexsort((w, b, a))
    a, b, w = a[order], b[order], w[order]
    first = np.ones(a.size, dtype=bool)
    first[1:] = (a[1:] != a[:-1]) | (b[1:] != b[:-1])
    return coo_matrix((w[first], (a[first], b[first])), shape=(n, n)).tocsr()


def leaf_dimension_estimate(space, measure, n_leaves, radii, rng, resolution=0.0):
    """Slope of log mu(B(x, r)) against log r, averaged over mu-sampled centres.

    ``resolution`` is the distance below which the finite representation
    cannot be trusted (e.g. a truncation gap bound); radii must lie above
    twice it and below half the largest distance seen from the centres.
    """
    radii = np.sort(np.asarray(radii, dtype=float))
    if radii.size < 2 or radii[0] <= 0:
        raise ValidationError("need at least two positive radii")
    if radii[0] <= 2.0 * resolution:
        raise ResolutionError(f"smallest radius {radii[0]:.3g} is within twice the resolution {resolution:.3g}")
    dec = space.decoration
    total = measure.total()
    if not total > 0:
        raise ValidationError("measure has no mass")
    handles, masses = _discrete_measure(dec, measure)
    masses = masses / masses.sum()
    n, edges, vertex = fused_graph(dec, space.theta)
    ids = np.array([vertex(u, i) for u, i in handles], dtype=np.int64)
    node_mass = np.bincount(ids, weights=masses, minlength=n)
    g = _min_graph(n, edges)
    centres = ids[rng.choice(ids.size, size=n_leaves, p=masses)]
    dist = dijkstra(g, directed=False, indices=centres)
    far = float(np.max(dist[np.isfinite(dist)]))
    if radii[-1] > 0.5 * far:
        raise ResolutionError(f"largest radius {radii[-1]:.3g} exceeds half the observed extent {far:.3g}")
    logm = np.empty((n_leaves, radii.size))
    for j, r in enumerate(radii):
        logm[:, j] = np.log((dist <= r) @ node_mass)
    mean = logm.mean(axis=0)
    x = np.log(radii)
    slope, intercept = np.polyfit(x, mean, 1)
    per = np.array([np.polyfit(x, row, 1)[0] for row in logm])
    stderr = float(per.std(ddof=1) / np.sqrt(n_leaves)) if n_leaves > 1 else float("nan")
    return DimensionEstimate(float(slope), stderr, radii, mean)
