"""Generalized Remy growth, uniform edge-splitting, and the second
decomposition of the two-edge-line variant.

Global id convention (shared by both representations): when step k splits
edge e=(a,b), e becomes (a,z), the new edge (z,b) takes the next edge id and
z the next vertex id; the glued seed's non-root vertices then take the next
vertex ids in seed order and its edges the next edge ids in seed order.
"""
from dataclasses import dataclass

import numpy as np

from .._jit import njit
from ..errors import ModeError, ParameterError, ValidationError
from .graph import MultiGraph
from .state import EDGE, GrowthState, LocalBlock, check_mode, make_trace


def _seed_getter(seeds):
    if isinstance(seeds, MultiGraph):
        return lambda k: seeds
    if callable(seeds):
        return seeds
    seeds = list(seeds)
    return lambda k: seeds[min(k, len(seeds)) - 1]


# ---------------------------------------------------------------- edge splitting

@njit(cache=True)
def _edge_split_kernel(ea, eb, origin, u, n_vertices, n_edges, marks):
    for s in range(u.shape[0]):
        e = int(u[s] * n_edges)
        if e >= n_edges:
            e = n_edges - 1
        z = n_vertices
        n_vertices += 1
        b = eb[e]
        eb[e] = z
        ea[n_edges] = z
        eb[n_edges] = b
        origin[n_edges] = origin[e]
        n_edges += 1
        marks[s] = z
    return n_vertices, n_edges


@dataclass
class EdgeSplitResult:
    graph: MultiGraph
    distinguished: np.ndarray
    origin: np.ndarray

    def path_lengths(self, n_original):
        """L(e, m): number of edges descending from each original edge."""
        return np.bincount(self.origin, minlength=n_original)


def edge_split_process(seed_graph, m, rng):
    """m steps of uniform edge splitting started from a rooted connected graph."""
    g = seed_graph.copy().validate_seed()
    E0, V0 = g.n_edges, g.n_vertices
    ea = np.zeros(E0 + m, dtype=np.int64)
    eb = np.zeros(E0 + m, dtype=np.int64)
    ea[:E0], eb[:E0] = zip(*g.edges)
    origin = np.zeros(E0 + m, dtype=np.int64)
    origin[:E0] = np.arange(E0)
    marks = np.zeros(m, dtype=np.int64)
    nv, ne = _edge_split_kernel(ea, eb, origin, rng.random(m), V0, E0, marks)
    out = MultiGraph(nv, list(zip(ea.tolist(), eb.tolist())), g.root)
    return EdgeSplitResult(out, marks, origin)


# ---------------------------------------------------------------- generalized Remy

def remy_generalized(seeds, n, rng, mode="both"):
    """H_1 = G_1; step k splits a uniform edge of H_k and glues G_{k+1} at the new vertex.

    ``seeds`` is one graph (used for every step), a list (the last entry
    repeats) or a callable k -> G_k.  The decorated side keeps one block per
    glued seed, evolving by uniform edge splitting, along the PA tree of blocks.
    """
    direct, decorated = check_mode(mode)
    get = _seed_getter(seeds)
    if n < 1:
        raise ParameterError("n must be at least 1")
    g1 = get(1).copy().validate_seed()
    graph = g1.copy() if direct else None
    edge_block = list(np.zeros(g1.n_edges, dtype=np.int64))
    nv, ne = g1.n_vertices, g1.n_edges
    blocks = handles = edge_local = None
    if decorated:
        b0 = LocalBlock(g1.n_vertices, g1.edges, root=g1.root)
        blocks = [b0]
        handles = [(0, v) for v in range(g1.n_vertices)]
        edge_local = list(range(g1.n_edges))
    parents = [-1]
    u = rng.random(max(n - 1, 0))
    records = []
    for k in range(1, n):
        seed = get(k + 1)
        if seed.n_edges < 1:
            raise ValidationError(f"seed {k + 1} has no edge")
        e = min(int(u[k - 1] * ne), ne - 1)
        owner = int(edge_block[e])
        records.append((k, EDGE, e, owner, -1))
        parents.append(owner)
        z = nv
        new_e = ne
        if direct:
            graph.split_edge(e)
            gmap = _glue_seed(graph, seed, z)
        edge_block.append(owner)
        edge_block.extend([k] * seed.n_edges)
        nv += 1 + seed.n_vertices - 1
        ne += 1 + seed.n_edges
        if decorated:
            blk = blocks[owner]
            zl, le = blk.split(edge_local[e])
            blk.attach.append(zl)
            handles.append((owner, zl))
            edge_local.append(le)
            nb = LocalBlock(seed.n_vertices, seed.edges, root=seed.root)
            blocks.append(nb)
            handles.extend((k, v) for v in range(seed.n_vertices) if v != seed.root)
            edge_local.extend(range(seed.n_edges))
    state = GrowthState("remy", {"seeds": seeds}, mode, n, graph=graph, block_parents=parents,
                        blocks=blocks, handles=handles, trace=make_trace(records))
    state.extra["edge_block"] = np.asarray(edge_block)
    state.extra["counts"] = (nv, ne)
    return state


def _glue_seed(graph, seed, z):
    vmap = {}
    for v in range(seed.n_vertices):
        vmap[v] = z if v == seed.root else graph.add_vertex()
    for a, b in seed.edges:
        graph.add_edge(vmap[a], vmap[b])
    return vmap


def standard_seeds():
    return MultiGraph.single_edge()


def two_line_seeds():
    """G_1 = single edge, G_k = two-edge line rooted at an end for k >= 2."""
    edge, line = MultiGraph.single_edge(), MultiGraph.path(2)
    return lambda k: edge if k == 1 else line


def remy_v2_decompose(state):
    """Second decomposition of the two-edge-line model.

    The lower edge of each glued line joins the block owning the split edge,
    which therefore performs a standard Remy step (new leaf = attach point);
    only the upper edge starts a new block.
    """
    if state.model != "remy":
        raise ModeError("remy_v2_decompose needs a generalized Remy state")
    get = _seed_getter(state.params["seeds"])
    edge, line = MultiGraph.single_edge(), MultiGraph.path(2)

    def same(g, h):
        return g.n_vertices == h.n_vertices and g.root == h.root and sorted(g.edges) == sorted(h.edges)
    if not same(get(1), edge) or any(not same(get(k), line) for k in range(2, state.n + 1)):
        raise ModeError("seeds must be a single edge followed by two-edge lines rooted at an end")
    blocks = [LocalBlock(2, [(0, 1)])]
    handles = [(0, 0), (0, 1)]
    owner_of = [(0, 0)]
    parents = [-1]
    for rec in state.trace:
        k, e = int(rec["step"]), int(rec["element"])
        b, le = owner_of[e]
        blk = blocks[b]
        z, le_new = blk.split(le)
        y = blk.add_point()
        lower = blk.add_edge(z, y)
        blk.attach.append(y)
        parents.append(b)
        blocks.append(LocalBlock(2, [(0, 1)]))
        # global order: z, then seed vertices (middle y, leaf t); edges: split, lower, upper
        handles.extend([(b, z), (b, y), (k, 1)])
        owner_of.extend([(b, le_new), (b, lower), (k, 0)])
    out = GrowthState("remy_v2", dict(state.params), "decorated", state.n, graph=state.graph,
                      block_parents=parents, blocks=blocks, handles=handles, trace=state.trace)
    return out


# ---------------------------------------------------------------- fast kernels

@njit(cache=True)
def _remy_kernel(ea, eb, u, n_vertices, n_edges):
    """Standard Remy steps on edge arrays (single-edge seeds)."""
    for s in range(u.shape[0]):
        e = int(u[s] * n_edges)
        if e >= n_edges:
            e = n_edges - 1
        z = n_vertices
        leaf = n_vertices + 1
        n_vertices += 2
        b = eb[e]
        eb[e] = z
        ea[n_edges] = z
        eb[n_edges] = b
        ea[n_edges + 1] = z
        eb[n_edges + 1] = leaf
        n_edges += 2
    return n_vertices, n_edges


def _tree_diameter(ea, eb, nv, ne):
    g = MultiGraph(nv, list(zip(ea[:ne].tolist(), eb[:ne].tolist())))
    d0 = g.distances(indices=[0])[0]
    far = int(np.argmax(d0))
    return float(g.distances(indices=[far])[0].max())


def remy_diameters(checkpoints, rng):
    """Diameters of the standard Remy tree H_n at increasing checkpoints n (two BFS sweeps)."""
    checkpoints = np.asarray(sorted(checkpoints), dtype=np.int64)
    n_max = int(checkpoints[-1])
    ea = np.zeros(2 * n_max, dtype=np.int64)
    eb = np.zeros(2 * n_max, dtype=np.int64)
    ea[0], eb[0] = 0, 1
    nv, ne = 2, 1
    u = rng.random(n_max - 1)
    done = 1
    out = []
    for c in checkpoints:
        nv, ne = _remy_kernel(ea, eb, u[done - 1:c - 1], nv, ne)
        done = c
        out.append(_tree_diameter(ea, eb, nv, ne))
    return np.array(out)


@njit(cache=True)
def _remy_height_kernel(u, parent, sub_height):
    """Run standard Remy with parent pointers; return sup_m height(m)/sqrt(m).

    Vertex 0 is the root (degree one); the edge above vertex v is identified
    with v, so a uniform edge is a uniform non-root vertex.
    """
    parent[0] = -1
    parent[1] = 0
    sub_height[0] = 1
    sub_height[1] = 0
    nv = 2
    best = 1.0
    for s in range(u.shape[0]):
        v = 1 + int(u[s] * (nv - 1))
        if v >= nv:
            v = nv - 1
        z = nv
        leaf = nv + 1
        nv += 2
        p = parent[v]
        parent[z] = p
        parent[v] = z
        parent[leaf] = z
        sub_height[leaf] = 0
        h = sub_height[v] + 1
        sub_height[z] = h
        x = p
        while x >= 0 and sub_height[x] < h + 1:
            sub_height[x] = h + 1
            h += 1
            x = parent[x]
        m = s + 2
        r = sub_height[0] / np.sqrt(m)
        if r > best:
            best = r
    return best


def remy_height_sup(n, rng):
    """sup over m <= n of (height with m leaves) / sqrt(m) for one standard Remy run."""
    parent = np.zeros(2 * n, dtype=np.int64)
    sub = np.zeros(2 * n, dtype=np.int64)
    return float(_remy_height_kernel(rng.random(n - 1), parent, sub))
