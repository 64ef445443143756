"""Growth state shared by all models: the direct graph, the block processes of
the coupled decoration, the PA tree over blocks, and the selection trace."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import ModeError
from ..glue import Block, Decoration, GluedSpace, Point
from .graph import MultiGraph
from .trees import RecursiveTree

MODES = ("direct", "decorated", "both")
EDGE, VERTEX = 0, 1

TRACE_DTYPE = np.dtype([("step", np.int64), ("kind", np.int8), ("element", np.int64),
                        ("block", np.int64), ("corner", np.int64)])


def check_mode(mode):
    if mode not in MODES:
        raise ModeError(f"mode must be one of {MODES}, got {mode!r}")
    return mode in ("direct", "both"), mode in ("decorated", "both")


class LocalBlock:
    """Unit-length graph block evolving inside a decoration (root is point 0
    unless given)."""
    __slots__ = ("n_points", "edges", "attach", "root")

    def __init__(self, n_points=1, edges=(), root=0):
        self.n_points = n_points
        self.edges = [list(e) for e in edges]
        self.attach = []
        self.root = root

    def add_point(self):
        self.n_points += 1
        return self.n_points - 1

    def split(self, le):
        """Subdivide local edge le=(a,b) into (a,z), (z,b); returns (z, new local edge)."""
        a, b = self.edges[le]
        z = self.add_point()
        self.edges[le] = [a, z]
        self.edges.append([z, b])
        return z, len(self.edges) - 1

    def add_edge(self, a, b):
        self.edges.append([a, b])
        return len(self.edges) - 1

    def to_block(self, scale=1.0):
        return Block(self.n_points, self.root, self.attach,
                     edges=[(a, b, scale) for a, b in self.edges], validate=False)


@dataclass
class GrowthState:
    model: str
    params: dict
    mode: str
    n: int
    graph: MultiGraph = None
    block_parents: list = field(default_factory=list)
    blocks: list = None
    handles: list = None
    trace: np.ndarray = None
    rotation: list = None
    loop_members: list = None
    loop_root_edge: list = None
    loop_child_edges: list = None
    extra: dict = field(default_factory=dict)

    # -- PA tree over blocks
    def pa_tree(self):
        return RecursiveTree(np.asarray(self.block_parents, dtype=np.int64))

    def block_addresses(self):
        return self.pa_tree().addresses()

    def _require_decorated(self):
        if self.blocks is None and self.loop_members is None:
            raise ModeError("state was grown without the decorated representation")

    # -- tree/graph side
    def decoration(self, scale=1.0):
        self._require_decorated()
        addrs = self.block_addresses()
        return Decoration({addrs[k]: b.to_block(scale) for k, b in enumerate(self.blocks)})

    def handle_points(self, handles=None):
        addrs = self.block_addresses()
        handles = self.handles if handles is None else handles
        return [Point(addrs[b], p) for b, p in handles]

    def decorated_distances(self):
        space = GluedSpace(self.decoration())
        return space.distances(self.handle_points())

    def direct_distances(self):
        if self.graph is None:
            raise ModeError("state was grown without the direct representation")
        return self.graph.distances()

    # -- looptree side (planar models)
    def looptree(self):
        from .planar import looptree_from_rotation
        return looptree_from_rotation(self.rotation, self.graph.root, self.graph.edges)

    def loop_decoration(self):
        if self.loop_members is None:
            raise ModeError("state has no looptree decomposition")
        addrs = self.block_addresses()
        blocks = {}
        loop_handles = {}
        for k, members in enumerate(self.loop_members):
            blk, local = _loop_block(members, self.loop_root_edge[k], self.loop_child_edges[k],
                                     self.rotation)
            blocks[addrs[k]] = blk
            for blue, i in local.items():
                loop_handles.setdefault(blue, Point(addrs[k], i))
        return Decoration(blocks), loop_handles

    def decorated_loop_distances(self):
        dec, handles = self.loop_decoration()
        n_blue = self.graph.n_edges
        return GluedSpace(dec).distances([handles[b] for b in range(n_blue)])

    def direct_loop_distances(self):
        return self.looptree().distances()


def _loop_block(members, root_edge, child_edges, rotation):
    """Loops of the given tree vertices glued along shared blue points.

    Blue points are tree edges; the root edge's blue point is local 0 and the
    child edges' blue points are the attach points in order.
    """
    local = {root_edge: 0}
    for i, f in enumerate(child_edges):
        local[f] = i + 1
    edges = []
    for x in members:
        cyc = rotation[x]
        for e in cyc:
            if e not in local:
                local[e] = len(local)
        d = len(cyc)
        for j in range(d):
            edges.append((local[cyc[j]], local[cyc[(j + 1) % d]], 1.0))
    blk = Block(len(local), 0, range(1, len(child_edges) + 1), edges=edges, validate=False)
    return blk, local


def make_trace(records):
    return np.array([tuple(r) for r in records], dtype=TRACE_DTYPE)


def write_trace(trace, path):
    with open(path, "w") as fh:
        fh.write("step,kind,element,block,corner\n")
        for r in trace:
            fh.write(f"{r['step']},{'edge' if r['kind'] == EDGE else 'vertex'},{r['element']},{r['block']},{r['corner']}\n")


def read_trace(path):
    rows = []
    with open(path) as fh:
        next(fh)
        for line in fh:
            s, k, e, b, c = line.strip().split(",")
            rows.append((int(s), EDGE if k == "edge" else VERTEX, int(e), int(b), int(c)))
    return make_trace(rows)
