"""Iterative gluing of scaled random blocks along a weighted recursive tree,
and the line-breaking construction of the generalized Remy limits."""
from dataclasses import dataclass

import numpy as np

from .._jit import njit
from ..distributions import sample_mlmc
from ..errors import ParameterError, ValidationError
from ..glue import Block, Decoration, GluedSpace, Point
from ..growth.remy import _seed_getter
from ..growth.trees import FitnessSequence, weight_measure, wrt_grow
from .blocks import LimitBlockSample


class ConstructedSpace(GluedSpace):
    """Glued space that also keeps the data of the construction as attributes."""

    def __init__(self, decoration, **info):
        super().__init__(decoration)
        self.info = info
        for k, v in info.items():
            setattr(self, k, v)


class GluingResult(tuple):
    """(decoration, space, measure), with the construction data as attributes."""

    def __new__(cls, decoration, space, measure, **info):
        obj = super().__new__(cls, (decoration, space, measure))
        obj.decoration, obj.space, obj.measure = decoration, space, measure
        for k, v in info.items():
            setattr(obj, k, v)
        return obj


@dataclass
class IterativeGluingSpec:
    """Data of an iterative gluing construction truncated at n blocks.

    Weights are explicit (``weights``) or MLMC increments (``mlmc=(alpha, theta)``).
    Scaling factors are explicit (``scalings``) or weights**``scaling_exponent``.
    ``block_sampler(k, n_points, rng)`` returns block k (1-based) with at
    least ``n_points`` distinguished points in order.  ``extra_points`` further
    i.i.d. points per block are kept as marked handles carrying the weight measure.
    """
    n: int
    block_sampler: object
    weights: object = None
    mlmc: tuple = None
    scalings: object = None
    scaling_exponent: float = 1.0
    extra_points: int = 0

    def validate(self):
        if self.n < 1:
            raise ParameterError("n must be at least 1")
        if self.weights is None and self.mlmc is None:
            raise ParameterError("give explicit weights or MLMC parameters")
        if self.extra_points < 0:
            raise ParameterError("extra_points must be nonnegative")
        return self

    def draw_weights(self, rng):
        self.validate()
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)[:self.n]
            if w.size < self.n:
                raise ParameterError(f"need {self.n} weights, got {w.size}")
        else:
            w = sample_mlmc(*self.mlmc, self.n, rng).increments
        if not w[0] > 0:
            raise ParameterError("the first weight must be positive")
        if self.scalings is not None:
            lam = np.asarray(self.scalings, dtype=float)[:self.n]
            if lam.size < self.n:
                raise ParameterError(f"need {self.n} scaling factors, got {lam.size}")
        else:
            lam = w ** self.scaling_exponent
        if np.any(lam < 0):
            raise ParameterError("scaling factors must be nonnegative")
        return w, lam


def _as_block(b):
    return b.block if isinstance(b, LimitBlockSample) else b


def iterative_gluing(spec, rng):
    """Sample the WRT on the weights, place block k at u_k scaled by lambda_k.

    Returns (decoration, glued space, weight measure mu_n(u_k) = w_k / W_n);
    ``result.marked`` lists the extra point handles of every block.
    """
    w, lam = spec.draw_weights(rng)
    n = spec.n
    tree = wrt_grow(w, n, rng)
    addrs = tree.addresses()
    deg = tree.out_degrees()
    blocks = {}
    marked = []
    W = float(w.sum())
    for k in range(n):
        need = int(deg[k]) + spec.extra_points
        blk = _as_block(spec.block_sampler(k + 1, need, rng))
        if len(blk.attach) < need:
            raise ValidationError(f"block {k + 1} has {len(blk.attach)} points, needs {need}")
        pts = blk.attach
        out = blk.with_attach(pts[:deg[k]])
        if spec.extra_points:
            masses = np.zeros(out.n_points)
            for x in pts[deg[k]:need]:
                masses[x] += w[k] / W / spec.extra_points
            out = Block(out.n_points, out.root, out.attach, masses,
                        edges=out.edges, matrix=out.matrix, validate=False)
            marked.extend(Point(addrs[k], x) for x in pts[deg[k]:need])
        blocks[addrs[k]] = out.scaled(lam[k])
    dec = Decoration(blocks)
    space = ConstructedSpace(dec, weights=w, scalings=lam, tree=tree, marked=marked)
    return GluingResult(dec, space, weight_measure(tree, w), weights=w, scalings=lam, tree=tree,
                        marked=marked)


def unit_segment_sampler(k, n_points, rng):
    """Unit segment rooted at 0 with i.i.d. uniform points."""
    pos = np.concatenate([[0.0], rng.random(n_points)])
    return Block(matrix=np.abs(pos[:, None] - pos[None, :]), root=0, attach=range(1, n_points + 1),
                 validate=False)


# ---------------------------------------------------------------- line breaking

def mlmc_parameters(fitness, n):
    """(1/(b+1), a/(b+1)) for fitnesses a, b, b, ... (checked on the first n terms)."""
    a = fitness.array(max(n, 2))
    b = a[1]
    if np.any(a[1:] != b):
        raise ParameterError("fitnesses must be constant from the second term on; supply the chain instead")
    if not b > 0:
        raise ParameterError("the constant fitness must be positive")
    return 1.0 / (b + 1.0), a[0] / (b + 1.0)


def _subdivided_block(g, lengths, marks):
    """Graph block for seed g with edge lengths; marks = list of (edge, position)
    points inserted as vertices.  Returns (block, point index of each mark)."""
    n = g.n_vertices
    on_edge = {}
    for i, (e, t) in enumerate(marks):
        on_edge.setdefault(e, []).append((t, i))
    edges = []
    where = [0] * len(marks)
    for e, (a, b) in enumerate(g.edges):
        L = float(lengths[e])
        prev, prev_t = a, 0.0
        for t, i in sorted(on_edge.get(e, [])):
            v = n
            n += 1
            edges.append((prev, v, t - prev_t))
            where[i] = v
            prev, prev_t = v, t
        edges.append((prev, b, L - prev_t))
    return Block(n, g.root, edges=edges, validate=False), where


def line_breaking(fitnesses, seeds, n, rng, chain=None, n_marked=0):
    """Cut [0, inf) at the MLMC values, turn the n-th piece into the seed G_n
    with Dirichlet-split edge lengths, glue each new piece at a uniform length
    point of the union so far.

    ``chain`` gives M_1..M_n explicitly (needed when the fitnesses are not
    constant from the second term).  ``n_marked`` i.i.d. points of the
    normalized length measure are added as handles in ``space.marked``.
    """
    if not isinstance(fitnesses, FitnessSequence):
        fitnesses = FitnessSequence(fitnesses)
    if n < 1:
        raise ParameterError("n must be at least 1")
    get = _seed_getter(seeds)
    a = fitnesses.array(n)
    for k in range(1, n + 1):
        if get(k).n_edges != a[k - 1]:
            raise ValidationError(f"seed {k} has {get(k).n_edges} edges, fitness is {a[k - 1]}")
    if chain is None:
        M = sample_mlmc(*mlmc_parameters(fitnesses, n), n, rng).values
    else:
        M = np.asarray(chain, dtype=float)[:n]
        if M.size < n or np.any(np.diff(M) < 0) or not M[0] > 0:
            raise ParameterError("chain must be positive, nondecreasing and of length n")
    m = np.diff(M, prepend=0.0)
    lengths = []
    for k in range(n):
        cuts = np.sort(rng.random(int(a[k]) - 1)) * m[k]
        lengths.append(np.diff(np.concatenate([[0.0], cuts, [m[k]]])))
    tree = wrt_grow(m, n, rng)
    addrs = tree.addresses()
    # attach points: one length point of the parent per child, in child order
    marks = [[] for _ in range(n)]
    for k in range(1, n):
        p = int(tree.parents[k])
        e = _pick_edge(lengths[p], rng)
        marks[p].append((e, rng.random() * lengths[p][e]))
    n_attach = [len(x) for x in marks]
    if n_marked:
        cum = np.cumsum(m)
        owners = np.minimum(np.searchsorted(cum, rng.random(n_marked) * cum[-1], side="right"), n - 1)
        for j in owners:
            e = _pick_edge(lengths[j], rng)
            marks[j].append((e, rng.random() * lengths[j][e]))
    blocks = {}
    marked = []
    for k in range(n):
        blk, where = _subdivided_block(get(k + 1), lengths[k], marks[k])
        blocks[addrs[k]] = blk.with_attach(where[:n_attach[k]])
        marked.extend(Point(addrs[k], v) for v in where[n_attach[k]:])
    dec = Decoration(blocks)
    return ConstructedSpace(dec, chain=M, piece_lengths=lengths, tree=tree, marked=marked,
                            total_length=float(sum(x.sum() for x in lengths)))


def _pick_edge(lengths, rng):
    cum = np.cumsum(lengths)
    return int(min(np.searchsorted(cum, rng.random() * cum[-1], side="right"), len(lengths) - 1))


# ---------------------------------------------------------------- lazy root distances

@njit(cache=True)
def _ancestor_path(cum, u, out):
    """Block holding a weight-measure point, then its WRT ancestors down to
    block 0.  Returns the path length, or -1 if the uniforms ran out."""
    n = cum.shape[0]
    k = np.searchsorted(cum, u[0] * cum[n - 1], side="right")
    if k >= n:
        k = n - 1
    out[0] = k
    c = 1
    while k > 0:
        if c >= u.shape[0]:
            return -1
        j = np.searchsorted(cum[:k], u[c] * cum[k - 1], side="right")
        if j >= k:
            j = k - 1
        k = j
        out[c] = k
        c += 1
    return c


def lazy_root_distance(weights, scalings, depth_sampler, rng):
    """Root-to-mu-point distance in one iterative gluing construction.

    Only the blocks on the path are sampled: the point's block k is chosen
    with probability w_k / W_n, each parent with probability proportional to
    the weights before it.  Every block on the path contributes
    lambda_k * D(root, nu-point), drawn independently by ``depth_sampler(size, rng)``.
    """
    w = np.asarray(weights, dtype=float)
    cum = np.cumsum(w)
    out = np.empty(w.size, dtype=np.int64)
    u = rng.random(64)
    c = _ancestor_path(cum, u, out)
    while c < 0:
        u = np.concatenate([u, rng.random(u.size)])
        c = _ancestor_path(cum, u, out)
    path = out[:c]
    return float(np.sum(np.asarray(scalings, dtype=float)[path] * depth_sampler(c, rng)))


def root_distance_samples(n_samples, n, mlmc, scaling_exponent, depth_sampler, rng):
    """Annealed root-to-mu-point distances: every sample uses a fresh MLMC path
    of length n and fresh blocks."""
    out = np.empty(n_samples)
    for r in range(n_samples):
        w = sample_mlmc(*mlmc, n, rng).increments
        out[r] = lazy_root_distance(w, w ** scaling_exponent, depth_sampler, rng)
    return out


def segment_depths(size, rng):
    return rng.random(size)
