"""Marchal's algorithm from an arbitrary rooted multigraph, with the
width-splitting decomposition into blocks.

Weights are kept as integer pairs (p, q) meaning p + q*alpha: an edge is
(-1, 1), a vertex of degree d >= 3 is (d-1, -1), lighter vertices are 0.
"""
import numpy as np

from .._jit import WeightTree, njit
from ..errors import ParameterError
from .graph import MultiGraph
from .state import EDGE, VERTEX, GrowthState, LocalBlock, check_mode, make_trace


def _check_alpha(alpha):
    if not 1.0 < alpha < 2.0:
        raise ParameterError(f"alpha must lie in (1,2), got {alpha}")


def block_weight_terms(graph):
    """(leaves, degree-two vertices, surplus)."""
    deg = graph.degrees()
    return int(np.sum(deg == 1)), int(np.sum(deg == 2)), graph.surplus()


def block_weight(graph, alpha):
    """Total Marchal weight of a connected multigraph from its leaf/degree-two/surplus counts."""
    ell, m, s = block_weight_terms(graph)
    return (ell - 1) * alpha + m * (alpha - 1) + s * (alpha + 1) - 1


def element_weight_sum(graph, alpha):
    """Direct sum of element weights (used to cross-check ``block_weight``)."""
    deg = graph.degrees()
    heavy = deg[deg >= 3]
    return graph.n_edges * (alpha - 1) + float(np.sum(heavy - 1 - alpha))


def marchal_grow(seed_graph, alpha, n, rng, mode="both"):
    """n-1 Marchal steps from ``seed_graph``.

    An edge pick splits the edge (new vertex z, weight 2-alpha) and hangs a
    new leaf from z; a vertex pick hangs a new leaf from it.  New ids: z then
    the leaf; edges (z, b) then (z, leaf).
    """
    _check_alpha(alpha)
    direct, decorated = check_mode(mode)
    g = seed_graph.copy().validate_seed()
    V0, E0 = g.n_vertices, g.n_edges
    cap = V0 + 2 * n
    deg = np.zeros(cap, dtype=np.int64)
    deg[:V0] = g.degrees()
    vp = np.zeros(cap, dtype=np.int64)
    vq = np.zeros(cap, dtype=np.int64)
    heavy = deg >= 3
    vp[heavy] = deg[heavy] - 1
    vq[heavy] = -1
    vtree = WeightTree(cap)
    for v in range(V0):
        vtree.append(vp[v] + vq[v] * alpha)
    P = int(vp.sum()) - E0
    Q = int(vq.sum()) + E0
    nv, ne = V0, E0
    ends = [list(e) for e in g.edges]

    graph = g if direct else None
    blocks = handles = edge_local = None
    if decorated:
        blocks = [LocalBlock(V0, g.edges, root=g.root)]
        handles = [(0, v) for v in range(V0)]
        edge_local = list(range(E0))
    parents = [-1]
    edge_block = [0] * E0
    vertex_block = np.zeros(cap, dtype=np.int64)
    totals = np.zeros((n, 2), dtype=np.int64)
    totals[0] = P, Q
    u = rng.random(max(n - 1, 0))
    records = []
    for k in range(1, n):
        r = u[k - 1] * (P + Q * alpha)
        te = ne * (alpha - 1)
        if r < te:
            e = min(int(r / (alpha - 1)), ne - 1)
            owner = edge_block[e]
            records.append((k, EDGE, e, owner, -1))
            a, b = ends[e]
            z, leaf = nv, nv + 1
            ends[e] = [a, z]
            ends.append([z, b])
            ends.append([z, leaf])
            nv += 2
            ne += 2
            deg[z], deg[leaf] = 3, 1
            vertex_block[z], vertex_block[leaf] = owner, k
            vp[z], vq[z] = 2, -1
            vtree.append(2 - alpha)
            vtree.append(0.0)
            P, Q = P + 0, Q + 1          # 2(alpha-1) + (2-alpha) = alpha
            edge_block.extend([owner, k])
            if direct:
                graph.split_edge(e)
                graph.add_vertex()
                graph.add_edge(z, leaf)
            if decorated:
                blk = blocks[owner]
                zl, le = blk.split(edge_local[e])
                blk.attach.append(zl)
                blocks.append(LocalBlock(2, [(0, 1)]))
                handles.extend([(owner, zl), (k, 1)])
                edge_local.extend([le, 0])
        else:
            v = vtree.find(r - te)
            owner = int(vertex_block[v])
            records.append((k, VERTEX, v, owner, -1))
            leaf = nv
            nv += 1
            ends.append([v, leaf])
            ne += 1
            deg[v] += 1
            deg[leaf] = 1
            vertex_block[leaf] = k
            vp[v] += 1
            vtree.add(v, 1.0)
            vtree.append(0.0)
            P, Q = P, Q + 1              # (alpha-1) + 1 = alpha
            edge_block.append(k)
            if direct:
                graph.add_vertex()
                graph.add_edge(v, leaf)
            if decorated:
                blk = blocks[owner]
                blk.attach.append(handles[v][1])
                blocks.append(LocalBlock(2, [(0, 1)]))
                handles.append((k, 1))
                edge_local.append(0)
        parents.append(owner)
        totals[k] = P, Q
    state = GrowthState("marchal", {"alpha": alpha, "seed": seed_graph}, mode, n, graph=graph,
                        block_parents=parents, blocks=blocks, handles=handles,
                        trace=make_trace(records))
    state.extra.update(weight_totals=totals, n_vertices=nv, n_edges=ne)
    return state


@njit(cache=True)
def _marchal_count_kernel(alpha, p0, q0, e0, v0, u, kinds):
    P = p0
    Q = q0
    ne = e0
    nv = v0
    for s in range(u.shape[0]):
        r = u[s] * (P + Q * alpha)
        if r < ne * (alpha - 1):
            kinds[s] = 0
            ne += 2
            nv += 2
        else:
            kinds[s] = 1
            ne += 1
            nv += 1
        Q += 1
    return nv, ne


def marchal_counts(seed_graph, alpha, n, rng, return_kinds=False):
    """(vertex count, edge count) of H_n with the same selection rule as ``marchal_grow``.

    Only the edge/vertex decision matters for the counts, and it depends on the
    totals alone, so this runs as a scalar chain.
    """
    _check_alpha(alpha)
    g = seed_graph
    deg = g.degrees()
    heavy = deg[deg >= 3]
    p0 = int(np.sum(heavy - 1)) - g.n_edges
    q0 = -int(heavy.size) + g.n_edges
    kinds = np.zeros(max(n - 1, 0), dtype=np.int8)
    nv, ne = _marchal_count_kernel(alpha, p0, q0, g.n_edges, g.n_vertices, rng.random(max(n - 1, 0)), kinds)
    if return_kinds:
        return int(nv), int(ne), kinds
    return int(nv), int(ne)
