"""Plane trees grown with uniform-corner insertion, and their looptrees.

A rotation is a list, per vertex, of incident edge ids in cyclic order; for a
non-root vertex the parent edge comes first.  Edges are stored parent->child.
"""
import numpy as np

from .._jit import WeightTree, fenwick_add, fenwick_find, njit
from ..errors import ParameterError, ValidationError
from ..ulam import PlaneTree
from .graph import MultiGraph
from .state import EDGE, VERTEX, GrowthState, LocalBlock, check_mode, make_trace


# ---------------------------------------------------------------- looptree functor

def looptree_from_rotation(rotation, root, edges=None):
    """Blue vertex per tree edge; consecutive edges around each non-root vertex are joined."""
    n_blue = len(edges) if edges is not None else 1 + max(max(r) for r in rotation if r)
    loops = []
    for v, cyc in enumerate(rotation):
        if v == root:
            continue
        d = len(cyc)
        if d == 1:
            loops.append((cyc[0], cyc[0]))
        else:
            loops.extend((cyc[j], cyc[(j + 1) % d]) for j in range(d))
    blue_root = rotation[root][0] if rotation[root] else 0
    return MultiGraph(n_blue, loops, root=blue_root)


def plane_tree_rotation(tree):
    """(rotation, root, edges) of a PlaneTree: edge ids follow the parent-edge order of
    vertices listed in ``tree.order`` (or sorted order)."""
    verts = list(tree.order) if tree.order is not None else sorted(tree, key=lambda u: (len(u), u))
    index = {u: i for i, u in enumerate(verts)}
    edges = []
    parent_edge = {}
    for u in verts:
        if u:
            parent_edge[u] = len(edges)
            edges.append((index[u[:-1]], index[u]))
    rotation = []
    for u in verts:
        cyc = [parent_edge[u]] if u else []
        cyc.extend(parent_edge[c] for c in tree.children(u))
        rotation.append(cyc)
    return rotation, index[()], edges


def looptree(tree):
    """Loop(tree) for a PlaneTree, a GrowthState with a rotation, or a (rotation, root, edges) triple."""
    if isinstance(tree, PlaneTree):
        rotation, root, edges = plane_tree_rotation(tree)
    elif isinstance(tree, GrowthState):
        rotation, root, edges = tree.rotation, tree.graph.root, tree.graph.edges
    else:
        rotation, root, edges = tree
    if not edges:
        raise ValidationError("looptree needs a tree with at least one edge")
    return looptree_from_rotation(rotation, root, edges)


# ---------------------------------------------------------------- alpha-gamma growth

def _check_alphagamma(alpha, gamma):
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0,1), got {alpha}")
    if not 0.0 < gamma <= alpha:
        raise ParameterError(f"gamma must lie in (0, alpha], got {gamma}")


def _vertex_weight(d, alpha, gamma):
    return (d - 2) * alpha - gamma if d >= 3 else 0.0


def alphagamma_grow(alpha, gamma, n, rng, mode="both"):
    """Planar alpha-gamma growth from a single edge, with tree and loop blocks.

    Selection uniforms come first from ``rng`` (so that gamma = 1 - alpha
    replays a Marchal run with parameter 1/alpha on the same seed); corner
    uniforms come from a stream spawned afterwards.
    """
    _check_alphagamma(alpha, gamma)
    direct, decorated = check_mode(mode)
    if n < 1:
        raise ParameterError("n must be at least 1")
    u = rng.random(max(n - 1, 0))
    cu = rng.spawn(1)[0].random(max(n - 1, 0))
    cap = 2 * n + 2
    lw, iw = 1.0 - alpha, gamma
    etree = WeightTree(cap)
    vtree = WeightTree(cap)
    etree.append(lw)
    vtree.append(0.0)
    vtree.append(0.0)
    deg = np.zeros(cap, dtype=np.int64)
    deg[0] = deg[1] = 1
    leafy = [True]                       # is edge adjacent to a leaf
    ends = [[0, 1]]
    rotation = [[0], [0]]
    vertex_block = np.zeros(cap, dtype=np.int64)
    edge_block = [0]
    nv, ne, n_internal = 2, 1, 0
    graph = MultiGraph.single_edge() if direct else None
    blocks = handles = edge_local = members = root_edge = child_edges = None
    if decorated:
        blocks = [LocalBlock(2, [(0, 1)])]
        handles = [(0, 0), (0, 1)]
        edge_local = [0]
        members, root_edge, child_edges = [[1]], [0], [[]]
    parents = [-1]
    edge_weight = np.zeros(n)
    leaf_weight = np.zeros(n)
    internal = np.zeros(n, dtype=np.int64)
    edge_weight[0] = leaf_weight[0] = lw
    records = []
    for k in range(1, n):
        total = k - alpha                 # n - alpha with n = k current leaves
        te = k * lw + n_internal * iw
        r = u[k - 1] * total
        v = -1
        if r >= te:
            v = vtree.find(r - te)
            if vtree.weights[v] <= 0.0:  # rounding at the edge/vertex boundary
                v, r = -1, te * (1 - 1e-15)
        if v < 0:
            e = etree.find(r)
            owner = edge_block[e]
            p, c = ends[e]
            z, leaf = nv, nv + 1
            e2, f = ne, ne + 1
            ends[e] = [p, z]
            ends.append([z, c])
            ends.append([z, leaf])
            corner = int(cu[k - 1] * 2)
            rotation.append([e, f, e2] if corner == 0 else [e, e2, f])
            rotation.append([f])
            rotation[c][rotation[c].index(e)] = e2
            leafy.append(leafy[e])
            leafy.append(True)
            if leafy[e]:
                leafy[e] = False
            etree.set(e, iw)
            etree.append(lw if leafy[e2] else iw)
            etree.append(lw)
            n_internal += 1
            deg[z], deg[leaf] = 3, 1
            vtree.append(_vertex_weight(3, alpha, gamma))
            vtree.append(0.0)
            vertex_block[z], vertex_block[leaf] = owner, k
            edge_block.extend([owner, k])
            nv += 2
            ne += 2
            records.append((k, EDGE, e, owner, corner))
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
                members[owner].append(z)
        else:
            owner = int(vertex_block[v])
            leaf, f = nv, ne
            corner = int(cu[k - 1] * deg[v])
            rotation[v].insert(corner + 1, f)
            rotation.append([f])
            ends.append([v, leaf])
            leafy.append(True)
            etree.append(lw)
            deg[v] += 1
            deg[leaf] = 1
            vtree.set(v, _vertex_weight(deg[v], alpha, gamma))
            vtree.append(0.0)
            vertex_block[leaf] = k
            edge_block.append(k)
            nv += 1
            ne += 1
            records.append((k, VERTEX, v, owner, corner))
            if direct:
                graph.add_vertex()
                graph.add_edge(v, leaf)
            if decorated:
                blk = blocks[owner]
                blk.attach.append(handles[v][1])
                blocks.append(LocalBlock(2, [(0, 1)]))
                handles.append((k, 1))
                edge_local.append(0)
        if decorated:
            members.append([leaf])
            root_edge.append(f)
            child_edges.append([])
            child_edges[owner].append(f)
        parents.append(owner)
        edge_weight[k] = (k + 1) * lw + n_internal * iw
        leaf_weight[k] = (k + 1) * lw
        internal[k] = n_internal
    state = GrowthState("alphagamma", {"alpha": alpha, "gamma": gamma}, mode, n, graph=graph,
                        block_parents=parents, blocks=blocks, handles=handles,
                        trace=make_trace(records), rotation=rotation, loop_members=members,
                        loop_root_edge=root_edge, loop_child_edges=child_edges)
    state.extra.update(edge_weight=edge_weight, leaf_edge_weight=leaf_weight,
                       internal_edges=internal, n_vertices=nv, n_edges=ne, edge_ends=ends)
    return state


@njit(cache=True)
def _alphagamma_count_kernel(alpha, gamma, u, kinds):
    internal = 0
    for s in range(u.shape[0]):
        k = s + 1
        if u[s] * (k - alpha) < k * (1.0 - alpha) + internal * gamma:
            kinds[s] = 0
            internal += 1
        else:
            kinds[s] = 1
    return internal


def alphagamma_counts(alpha, gamma, n, rng, return_kinds=False):
    """(internal edge count, total edge weight) at step n, using the same
    selection uniforms and edge/vertex rule as ``alphagamma_grow``."""
    _check_alphagamma(alpha, gamma)
    kinds = np.zeros(max(n - 1, 0), dtype=np.int8)
    internal = int(_alphagamma_count_kernel(alpha, gamma, rng.random(max(n - 1, 0)), kinds))
    weight = n * (1.0 - alpha) + internal * gamma
    if return_kinds:
        return internal, weight, kinds
    return internal, weight


# ---------------------------------------------------------------- LPAM

def _check_delta(delta):
    if not delta > -1.0:
        raise ParameterError(f"delta must exceed -1, got {delta}")


def lpam_grow(delta, n, rng, mode="both"):
    """Planar affine preferential attachment: vertex v >= 1 chosen with weight
    deg(v) + delta, new leaf inserted in a uniform corner of v.

    Vertex 0 is the root (not a real vertex); the parent edge of vertex v is
    edge v-1, and block v-1 is the loop of v.
    """
    _check_delta(delta)
    direct, decorated = check_mode(mode)
    if n < 1:
        raise ParameterError("n must be at least 1")
    u = rng.random(max(n - 1, 0))
    cu = rng.random(max(n - 1, 0))
    deg = np.zeros(n + 1, dtype=np.int64)
    deg[0] = deg[1] = 1
    wt = WeightTree(n + 1)
    wt.append(0.0)
    wt.append(1.0 + delta)
    rotation = [[0], [0]]
    graph = MultiGraph.single_edge() if direct else None
    parents = [-1]
    child_edges = [[]]
    totals = np.zeros(n)
    totals[0] = 1.0 + delta
    records = []
    for k in range(1, n):
        total = (2 * k - 1) + k * delta
        v = wt.find(u[k - 1] * total)
        if v == 0:
            v = 1
        w, f = k + 1, k
        corner = int(cu[k - 1] * deg[v])
        rotation[v].insert(corner + 1, f)
        rotation.append([f])
        deg[v] += 1
        deg[w] = 1
        wt.add(v, 1.0)
        wt.append(1.0 + delta)
        records.append((k, VERTEX, v, v - 1, corner))
        parents.append(v - 1)
        child_edges.append([])
        child_edges[v - 1].append(f)
        if direct:
            graph.add_vertex()
            graph.add_edge(v, w)
        totals[k] = total + 2 + delta
    mem = [[v] for v in range(1, n + 1)] if decorated else None
    state = GrowthState("lpam", {"delta": delta}, mode, n, graph=graph, block_parents=parents,
                        trace=make_trace(records), rotation=rotation, loop_members=mem,
                        loop_root_edge=list(range(n)) if decorated else None,
                        loop_child_edges=child_edges if decorated else None)
    state.extra.update(weight_totals=totals, degrees=deg)
    return state


@njit(cache=True)
def _lpam_degree_kernel(delta, u, tree, weights):
    """Degree of vertex 1 after the run, same selection rule as ``lpam_grow``."""
    fenwick_add(tree, 1, 1.0 + delta)
    weights[1] = 1.0 + delta
    for s in range(u.shape[0]):
        k = s + 1
        total = (2 * k - 1) + k * delta
        v = fenwick_find(tree, weights, u[s] * total, k + 1)
        if v == 0:
            v = 1
        weights[v] += 1.0
        fenwick_add(tree, v, 1.0)
        weights[k + 1] = 1.0 + delta
        fenwick_add(tree, k + 1, 1.0 + delta)
    return weights[1] - delta


def lpam_first_degree(delta, n, rng):
    """deg(v_1) in T_n, without building the tree (selection uniforms as in ``lpam_grow``)."""
    _check_delta(delta)
    u = rng.random(max(n - 1, 0))
    rng.random(max(n - 1, 0))
    return float(_lpam_degree_kernel(delta, u, np.zeros(n + 2), np.zeros(n + 1)))
