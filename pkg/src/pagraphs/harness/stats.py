"""Distance summaries, 1-d Wasserstein distance and log-log slope fits."""
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import dijkstra

from ..errors import ValidationError
from ..glue import GluedSpace, fused_graph
from ..growth.graph import MultiGraph
from ..limits.dimension import _min_graph
from ..ulam import ROOT

EXACT_LIMIT = 2000

Histogram = namedtuple("Histogram", "edges counts")


@dataclass
class DistanceSummary:
    diameter: float
    diameter_exact: bool
    height: float
    n_points: int
    histogram: Histogram
    sample: np.ndarray = field(repr=False)

    def as_dict(self):
        return {"diameter": self.diameter, "diameter_exact": self.diameter_exact,
                "height": self.height, "n_points": self.n_points,
                "mean_distance": float(self.sample.mean()) if self.sample.size else 0.0}


def fixed_histogram(values, bin_width=1.0, upper=None):
    """Histogram on [0, upper] with bins of the given width (upper rounded up to a whole bin)."""
    values = np.asarray(values, dtype=float)
    if upper is None:
        upper = float(values.max()) if values.size else 0.0
    n_bins = max(1, int(np.ceil(upper / bin_width + 1e-12)))
    edges = np.arange(n_bins + 1) * bin_width
    counts, _ = np.histogram(values, bins=edges)
    if values.size and values.max() >= edges[-1]:
        counts[-1] += int(np.sum(values == edges[-1]))
    return Histogram(edges, counts)


class _GraphView:
    """Uniform access to the points of a MultiGraph or a finite glued space."""

    def __init__(self, obj):
        if isinstance(obj, MultiGraph):
            self.n = obj.n_vertices
            self.root = obj.root
            self._graph = obj.adjacency()
            self._space = None
            self.is_tree = obj.n_edges == obj.n_vertices - 1 and obj.is_connected()
        elif isinstance(obj, GluedSpace):
            dec = obj.decoration
            if not dec.is_finite:
                raise ValidationError("distance statistics need a finite decoration")
            self._space = obj
            self.points = dec.points(obj.theta)
            self.n = len(self.points)
            n, edges, vertex = fused_graph(dec, obj.theta)
            self._ids = np.array([vertex(u, i) for u, i in self.points], dtype=np.int64)
            self.root = self.points.index((ROOT, dec.block(ROOT).root))
            self._graph = _min_graph(n, edges) if edges else None
            self.is_tree = self._graph is None or (self._graph.nnz == n - 1 and np.all(np.isfinite(
                dijkstra(self._graph, directed=False, indices=0))))
        else:
            raise ValidationError(f"unsupported object {type(obj).__name__}")
        if self.n < 1:
            raise ValidationError("empty space")

    def all_pairs(self):
        if self._space is None:
            return dijkstra(self._graph, directed=False, unweighted=True)
        return self._space.distances(self.points)

    def rows(self, sources):
        sources = np.atleast_1d(np.asarray(sources, dtype=np.int64))
        if self._space is None:
            return dijkstra(self._graph, directed=False, unweighted=True, indices=sources)
        if self._graph is None:
            return np.zeros((sources.size, self.n))
        d = dijkstra(self._graph, directed=False, indices=self._ids[sources])
        return d[:, self._ids]


def distance_stats(obj, sample_size, rng, bin_width=None):
    """Diameter, height from the root and a fixed-bin histogram of distances
    between ``sample_size`` uniform pairs of points.

    The diameter is exact for trees (two sweeps) and up to EXACT_LIMIT points
    (all pairs); otherwise it is the two-sweep lower bound and
    ``diameter_exact`` is False.  Unweighted graphs
    default to unit bins, glued spaces to 50 bins over the diameter.
    """
    view = _GraphView(obj)
    n = view.n
    if n <= EXACT_LIMIT and not view.is_tree:
        d = view.all_pairs()
        diam, exact = float(d.max()), True
        height = float(d[view.root].max())
        i = rng.integers(n, size=sample_size)
        j = rng.integers(n, size=sample_size)
        sample = d[i, j]
    else:
        r0 = view.rows([view.root])[0]
        height = float(r0.max())
        far = int(np.argmax(r0))
        diam, exact = float(view.rows([far])[0].max()), view.is_tree
        i = rng.integers(n, size=sample_size)
        j = rng.integers(n, size=sample_size)
        src, inv = np.unique(i, return_inverse=True)
        sample = view.rows(src)[inv, j] if sample_size else np.zeros(0)
    if bin_width is None:
        bin_width = 1.0 if isinstance(obj, MultiGraph) else max(diam, 1e-300) / 50
    hist = fixed_histogram(sample, bin_width, upper=max(diam, bin_width))
    return DistanceSummary(diam, exact, height, n, hist, np.asarray(sample, dtype=float))


def _as_weighted(h):
    if isinstance(h, Histogram):
        edges = np.asarray(h.edges, dtype=float)
        return 0.5 * (edges[:-1] + edges[1:]), np.asarray(h.counts, dtype=float)
    v = np.asarray(h, dtype=float).ravel()
    return v, np.ones(v.size)


def wasserstein1(a, b):
    """W1 between two 1-d distributions given as samples or Histograms
    (histogram mass sits at bin centres): area between the two CDFs."""
    xa, wa = _as_weighted(a)
    xb, wb = _as_weighted(b)
    if wa.sum() <= 0 or wb.sum() <= 0:
        raise ValidationError("empty distribution")
    grid = np.union1d(xa, xb)
    fa = _cdf(xa, wa / wa.sum(), grid)
    fb = _cdf(xb, wb / wb.sum(), grid)
    return float(np.sum(np.abs(fa - fb)[:-1] * np.diff(grid)))


def _cdf(x, w, grid):
    order = np.argsort(x, kind="stable")
    cum = np.cumsum(w[order])
    k = np.searchsorted(x[order], grid, side="right")
    return np.where(k > 0, cum[np.maximum(k - 1, 0)], 0.0)


def loglog_slope(xs, ys, window=None, min_points=10):
    """Least-squares slope of log y on log x over xs in ``window`` = (lo, hi), with its standard error."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise ValidationError("xs and ys differ in length")
    if window is not None:
        keep = (xs >= window[0]) & (xs <= window[1])
        xs, ys = xs[keep], ys[keep]
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValidationError("log-log fit needs positive data")
    if xs.size < min_points:
        raise ValidationError(f"window holds {xs.size} points, need at least {min_points}")
    lx, ly = np.log(xs), np.log(ys)
    xm = lx - lx.mean()
    sxx = float(xm @ xm)
    if sxx == 0:
        raise ValidationError("all x values coincide")
    slope = float(xm @ (ly - ly.mean()) / sxx)
    resid = ly - ly.mean() - slope * xm
    stderr = float(np.sqrt(resid @ resid / (xs.size - 2) / sxx))
    return slope, stderr
