"""Samplers for the continuum blocks: random metric graphs with Dirichlet edge
lengths, the stick-weighted variant, the coupled segment/string-of-circles
pair, and Remy-based approximations of the Brownian block.

Each sampler returns a point cloud (root first, then the distinguished points
in order) with exact distances, plus a provenance record.
"""
from dataclasses import dataclass, field
import json
import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .._jit import njit
from ..distributions import crp_conditional_draws, diversity_estimate, sample_gem
from ..errors import ParameterError, ResolutionError, ValidationError
from ..glue import Block, Decoration, write_decoration
from ..growth.graph import MultiGraph
from ..ulam import ROOT

ROOTED_EDGE = "rooted-edge"

# point clouds above this size are kept as graphs instead of full matrices
MATRIX_LIMIT = 2000


@dataclass
class LimitBlockSample:
    block: Block
    provenance: dict = field(default_factory=dict)
    scale: float = 1.0

    def scaled(self, a):
        prov = dict(self.provenance)
        return LimitBlockSample(self.block.scaled(a), prov, self.scale * float(a))

    def write(self, path, seed=None):
        """Decoration-format file holding the block at the root, plus ``path + '.json'``."""
        write_decoration(Decoration({ROOT: self.block}), path)
        write_provenance(self, path + ".json", seed=seed)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    return x


def write_provenance(sample, path, seed=None):
    rec = dict(sample.provenance)
    rec["scale"] = sample.scale
    if seed is not None:
        rec["seed"] = seed
    with open(path, "w") as fh:
        json.dump(_jsonable(rec), fh, indent=1, sort_keys=True)


# ---------------------------------------------------------------- metric graphs with points

def metric_graph_points(n_vertices, edges, lengths, points):
    """Exact distance matrix between points of a metric graph.

    ``points`` is a list of ("v", vertex) or ("e", edge, position) with the
    position measured from the first endpoint of the edge.
    """
    lengths = np.asarray(lengths, dtype=float)
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    # shortest copy of each multi-edge; loops never shorten vertex distances
    best = {}
    for (a, b), w in zip(e.tolist(), lengths.tolist()):
        if a != b:
            key = (min(a, b), max(a, b))
            best[key] = min(best.get(key, math.inf), w)
    if best:
        rows, cols = zip(*best)
        g = coo_matrix((list(best.values()), (rows, cols)), shape=(n_vertices, n_vertices))
        D = dijkstra(g.tocsr(), directed=False)
    else:
        D = np.where(np.eye(n_vertices, dtype=bool), 0.0, np.inf)
    n = len(points)
    ends = np.zeros((n, 2), dtype=np.int64)
    off = np.zeros((n, 2))
    edge_of = np.full(n, -1, dtype=np.int64)
    pos = np.zeros(n)
    for k, p in enumerate(points):
        if p[0] == "v":
            ends[k] = p[1], p[1]
        else:
            j, t = int(p[1]), float(p[2])
            a, b = e[j]
            ends[k] = a, b
            off[k] = t, lengths[j] - t
            edge_of[k] = j
            pos[k] = t
    d = np.full((n, n), np.inf)
    for i in range(2):
        for j in range(2):
            cand = off[:, i][:, None] + D[np.ix_(ends[:, i], ends[:, j])] + off[:, j][None, :]
            np.minimum(d, cand, out=d)
    same = (edge_of[:, None] == edge_of[None, :]) & (edge_of[:, None] >= 0)
    np.minimum(d, np.where(same, np.abs(pos[:, None] - pos[None, :]), np.inf), out=d)
    np.fill_diagonal(d, 0.0)
    d = np.minimum(d, d.T)
    return d


def _length_points(lengths, count, rng):
    """``count`` i.i.d. points under the length measure: (edge, position) pairs."""
    total = float(np.sum(lengths))
    cum = np.cumsum(lengths)
    edges = np.minimum(np.searchsorted(cum, rng.random(count) * total, side="right"), len(lengths) - 1)
    return edges, rng.random(count) * np.asarray(lengths)[edges]


def _seed(seed_graph):
    if not isinstance(seed_graph, MultiGraph):
        raise ValidationError("seed must be a MultiGraph")
    return seed_graph.copy().validate_seed()


def _check_alpha12(alpha):
    if not 1.0 < alpha < 2.0:
        raise ParameterError(f"alpha must lie in (1,2), got {alpha}")


def _heavy_vertices(g):
    deg = g.degrees()
    return np.nonzero(deg >= 3)[0], deg


def _cloud(g, lengths, pts, validate=True):
    points = [("v", g.root)] + pts
    d = metric_graph_points(g.n_vertices, g.edges, lengths, points)
    return Block(matrix=d, root=0, attach=range(1, len(points)), validate=validate)


def sample_block_CG(seed_graph, n_points, rng):
    """Seed graph with Dir(1,...,1) edge lengths and points i.i.d. under the length measure."""
    g = _seed(seed_graph)
    lengths = rng.dirichlet(np.ones(g.n_edges))
    e, t = _length_points(lengths, n_points, rng)
    pts = [("e", a, b) for a, b in zip(e.tolist(), t.tolist())]
    blk = _cloud(g, lengths, pts)
    prov = {"sampler": "CG", "edges": g.edges, "lengths": lengths, "n_points": n_points}
    return LimitBlockSample(blk, prov)


def sample_block_Calpha(seed_graph, alpha, n_points, n_sticks, rng):
    """Limit block of the width-splitting process started from ``seed_graph``.

    Heavy vertices (degree >= 3) carry atoms W_v, the rest W_E is spread over
    stick atoms at uniform length points; lengths are W_E^(alpha-1) S Dir(1..1)
    with S the (alpha-1)-diversity of the sticks.  ``n_sticks=None`` uses the
    default truncation of ``sample_gem``.
    """
    _check_alpha12(alpha)
    g = _seed(seed_graph)
    heavy, deg = _heavy_vertices(g)
    E = g.n_edges
    params = np.concatenate([[E * (alpha - 1.0)], deg[heavy] - 1.0 - alpha])
    W = rng.dirichlet(params) if heavy.size else np.ones(1)
    WE, Wv = float(W[0]), W[1:]
    sticks = sample_gem(alpha - 1.0, E * (alpha - 1.0), n_sticks, rng)
    S = float(diversity_estimate(sticks))
    lengths = WE ** (alpha - 1.0) * S * rng.dirichlet(np.ones(E))
    P = sticks.fractions
    # where X_i lands: heavy vertex j (code j) or stick j (code -1-j)
    u = rng.random(n_points)
    cumv = np.cumsum(Wv)
    v_hit = np.searchsorted(cumv, u, side="right")
    on_edges = v_hit >= heavy.size
    cum = np.cumsum(P)
    j = np.minimum(np.searchsorted(cum, rng.random(n_points) * cum[-1], side="right"), P.size - 1)
    used = np.unique(j[on_edges])
    ze, zt = _length_points(lengths, used.size, rng)
    zmap = {int(s): k for k, s in enumerate(used)}
    pts = []
    for i in range(n_points):
        if on_edges[i]:
            k = zmap[int(j[i])]
            pts.append(("e", int(ze[k]), float(zt[k])))
        else:
            pts.append(("v", int(heavy[v_hit[i]])))
    blk = _cloud(g, lengths, pts)
    prov = {"sampler": "Calpha", "alpha": alpha, "edges": g.edges, "lengths": lengths,
            "heavy_vertices": heavy, "vertex_atoms": Wv, "edge_mass": WE, "diversity": S,
            "n_sticks": len(sticks), "residual_stick_mass": sticks.residual,
            "atom_total": float(Wv.sum() + WE * P.sum()), "n_points": n_points}
    return LimitBlockSample(blk, prov)


def sample_block_Clen(seed, alpha, n_points, rng):
    """Second-decomposition block: Dirichlet lengths and vertex atoms, points from
    nu = sum_v L(v) delta_v + length measure.

    ``seed`` is a MultiGraph or ``ROOTED_EDGE`` for the single edge whose root
    carries an atom.
    """
    _check_alpha12(alpha)
    if isinstance(seed, str):
        if seed != ROOTED_EDGE:
            raise ParameterError(f"unknown seed {seed!r}")
        g = MultiGraph.single_edge()
        heavy = np.array([0])
        params = [1.0, (2.0 - alpha) / (alpha - 1.0)]
    else:
        g = _seed(seed)
        heavy, deg = _heavy_vertices(g)
        params = np.concatenate([np.ones(g.n_edges), (deg[heavy] - 1.0 - alpha) / (alpha - 1.0)])
    L = rng.dirichlet(params)
    lengths, Lv = L[:g.n_edges], L[g.n_edges:]
    u = rng.random(n_points)
    v_hit = np.searchsorted(np.cumsum(Lv), u, side="right")
    on_edges = v_hit >= heavy.size
    ze, zt = _length_points(lengths, n_points, rng)
    pts = [("e", int(ze[i]), float(zt[i])) if on_edges[i] else ("v", int(heavy[v_hit[i]]))
           for i in range(n_points)]
    blk = _cloud(g, lengths, pts)
    prov = {"sampler": "Clen", "alpha": alpha, "seed": "rooted-edge" if isinstance(seed, str) else g.edges,
            "lengths": lengths, "vertex_atoms": Lv, "atom_vertices": heavy,
            "nu_total": float(lengths.sum() + Lv.sum()), "n_points": n_points}
    return LimitBlockSample(blk, prov)


# ---------------------------------------------------------------- segment / string of circles

@njit(cache=True)
def _y_sequence(y1, coin, unif, r):
    n = coin.shape[0] + 1
    y = np.empty(n)
    y[0] = y1
    top = y1
    for k in range(1, n):
        if coin[k - 1] < top:
            y[k] = unif[k - 1] * top
        else:
            y[k] = 1.0 - r[k - 1] * (1.0 - top)
            top = y[k]
    return y


def sample_y_sequence(alpha, gamma, n, rng):
    """Y_1 ~ Beta(1, (1-alpha)/gamma); later points uniform below the running max
    with probability equal to it, else 1 - R (1 - max) with a fresh R of the same law."""
    b = (1.0 - alpha) / gamma
    y1 = rng.beta(1.0, b)
    m = max(n - 1, 0)
    return _y_sequence(y1, rng.random(m), rng.random(m), rng.beta(1.0, b, size=m))


def _check_ag(alpha, gamma):
    if not (0.0 < alpha < 1.0 and 0.0 < gamma <= alpha):
        raise ParameterError(f"need 0 < gamma <= alpha < 1, got alpha={alpha}, gamma={gamma}")


def sample_blocks_SB_joint(alpha, gamma, n_points, n_sticks, rng):
    """Coupled (segment, string of circles) limit blocks of the alpha-gamma growth.

    The segment is [0, S] with points S Y_{D_k}.  The string has a circle of
    circumference P_i for every stick, ordered by Y_i; circle i is entered at
    its root (arc position 0) and left at an independent uniform exit U_i.  The
    root of the string sits at coordinate 0 of the order; the unseen part of
    the string between it and the first kept circle has length at most half
    the residual stick mass, recorded as ``root_gap_bound``.
    """
    _check_ag(alpha, gamma)
    if gamma == alpha:
        y = sample_y_sequence(alpha, gamma, n_points, rng)
        pos = np.concatenate([[0.0], y])
        d = np.abs(pos[:, None] - pos[None, :])
        blk = Block(matrix=d, root=0, attach=range(1, n_points + 1), validate=n_points <= MATRIX_LIMIT)
        prov = {"sampler": "SB", "alpha": alpha, "gamma": gamma, "degenerate": True, "Y": y,
                "n_points": n_points}
        s = LimitBlockSample(blk, prov)
        return s, LimitBlockSample(blk, dict(prov))
    sticks = sample_gem(gamma / alpha, (1.0 - alpha) / alpha, n_sticks, rng)
    S = float(diversity_estimate(sticks))
    P = sticks.fractions
    D = crp_conditional_draws(sticks, n_points, rng)
    y = sample_y_sequence(alpha, gamma, P.size, rng)
    marked = y[D - 1]
    # segment
    pos = np.concatenate([[0.0], S * marked])
    seg = Block(matrix=np.abs(pos[:, None] - pos[None, :]), root=0, attach=range(1, n_points + 1),
                validate=n_points <= MATRIX_LIMIT)
    # string of circles
    exit_pos = rng.random(P.size) * P
    gap = np.minimum(exit_pos, P - exit_pos)          # d_i(rho_i, U_i)
    order = np.argsort(y, kind="stable")
    before = np.empty(P.size)
    before[order] = np.concatenate([[0.0], np.cumsum(gap[order])[:-1]])   # coordinate of rho_i
    circ = D - 1
    s = rng.random(n_points) * P[circ]
    Pc = P[circ]
    to_root = np.minimum(s, Pc - s)
    to_exit = np.abs(s - exit_pos[circ])
    to_exit = np.minimum(to_exit, Pc - to_exit)
    c = before[circ]
    g = gap[circ]
    yc = y[circ]
    lower = yc[:, None] < yc[None, :]
    # x in C_i, y in C_j with Y_i < Y_j: d_i(x, U_i) + (c_j - c_i - g_i) + d_j(rho_j, y)
    forward = to_exit[:, None] + (c[None, :] - c[:, None] - g[:, None]) + to_root[None, :]
    arc = np.abs(s[:, None] - s[None, :])
    arc = np.minimum(arc, Pc[:, None] - arc)
    dm = np.where(lower, forward, np.where(lower.T, forward.T, arc))
    same = circ[:, None] == circ[None, :]
    dm = np.where(same, arc, dm)
    dm = np.maximum(dm, 0.0)
    root_row = c + to_root
    full = np.zeros((n_points + 1, n_points + 1))
    full[1:, 1:] = dm
    full[0, 1:] = root_row
    full[1:, 0] = root_row
    np.fill_diagonal(full, 0.0)
    string = Block(matrix=full, root=0, attach=range(1, n_points + 1), validate=n_points <= MATRIX_LIMIT)
    circles_used = np.unique(circ)
    # coupling identity: marked coordinates on the segment are the circle positions in the string
    if not np.array_equal(np.unique(marked), np.unique(y[circles_used])):
        raise ValidationError("segment marks and circle positions disagree")
    base = {"alpha": alpha, "gamma": gamma, "degenerate": False, "diversity": S, "n_sticks": P.size,
            "residual_stick_mass": sticks.residual, "labels": D, "n_points": n_points}
    prov_s = dict(base, sampler="S", marked_coordinates=marked)
    prov_b = dict(base, sampler="B", circle_coordinates=y[circles_used], circles=circles_used,
                  total_circumference=float(P.sum()), root_gap_bound=0.5 * sticks.residual)
    return LimitBlockSample(seg, prov_s), LimitBlockSample(string, prov_b)


# ---------------------------------------------------------------- Brownian block approximation

@njit(cache=True)
def _remy_parents(u, parent):
    parent[0] = -1
    parent[1] = 0
    nv = 2
    for s in range(u.shape[0]):
        v = 1 + int(u[s] * (nv - 1))
        if v >= nv:
            v = nv - 1
        z = nv
        leaf = nv + 1
        nv += 2
        parent[z] = parent[v]
        parent[v] = z
        parent[leaf] = z
    return nv


def brownian_block_approx(m, rng, min_leaves=100):
    """Standard Remy tree with m leaves, distances times m^(-1/2).

    Distinguished points are the leaves in creation order (vertex 1, then the
    leaf added at each step).  Above ``MATRIX_LIMIT`` leaves the block is kept
    as a weighted tree and distances are computed on demand.
    """
    if m < min_leaves:
        raise ResolutionError(f"need at least {min_leaves} leaves, got {m}")
    if m < 1:
        raise ResolutionError("need at least one leaf")
    parent = np.empty(2 * m, dtype=np.int64)
    nv = _remy_parents(rng.random(m - 1), parent)
    scale = m ** -0.5
    leaves = np.concatenate([[1], np.arange(3, nv, 2)])
    edges = [(int(parent[v]), v, scale) for v in range(1, nv)]
    tree = Block(nv, 0, leaves, edges=edges, validate=False)
    if m <= MATRIX_LIMIT:
        idx = np.concatenate([[0], leaves])
        blk = Block(matrix=tree.submatrix(idx), root=0, attach=range(1, m + 1), validate=False)
    else:
        blk = tree
    prov = {"sampler": "brownian_approx", "approximate": True, "resolution": m, "kind": blk.kind}
    return LimitBlockSample(blk, prov, scale)


@njit(cache=True)
def _remy_leaf_depths(m, u_steps, u_pick, out):
    parent = np.empty(2 * m, dtype=np.int64)
    for r in range(out.shape[0]):
        _remy_parents(u_steps[r], parent)
        j = int(u_pick[r] * m)
        if j >= m:
            j = m - 1
        x = 1 if j == 0 else 2 * j + 1
        d = 0
        while parent[x] >= 0:
            d += 1
            x = parent[x]
        out[r] = d / math.sqrt(m)


def remy_leaf_depths(m, size, rng):
    """Root-to-uniform-leaf distances of ``size`` independent scaled Remy trees with m leaves."""
    if m < 1:
        raise ResolutionError("need at least one leaf")
    out = np.empty(size)
    _remy_leaf_depths(m, rng.random((size, m - 1)), rng.random(size), out)
    return out
