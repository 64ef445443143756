"""Undirected multigraphs with stable integer ids, plus the BFS distance oracle."""
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from ..errors import ValidationError


class MultiGraph:
    """Vertices 0..n-1, edges stored as (a, b) pairs; multi-edges and loops allowed."""

    def __init__(self, n_vertices=0, edges=(), root=0):
        self.n_vertices = int(n_vertices)
        self.edges = [tuple(map(int, e)) for e in edges]
        self.root = int(root)

    @classmethod
    def single_edge(cls):
        return cls(2, [(0, 1)])

    @classmethod
    def path(cls, k):
        return cls(k + 1, [(i, i + 1) for i in range(k)])

    @classmethod
    def star(cls, k):
        return cls(k + 1, [(0, i) for i in range(1, k + 1)])

    @classmethod
    def self_loop(cls):
        return cls(1, [(0, 0)])

    def copy(self):
        return MultiGraph(self.n_vertices, list(self.edges), self.root)

    @property
    def n_edges(self):
        return len(self.edges)

    def add_vertex(self):
        self.n_vertices += 1
        return self.n_vertices - 1

    def add_edge(self, a, b):
        self.edges.append((a, b))
        return len(self.edges) - 1

    def split_edge(self, e):
        """Subdivide edge e=(a,b): e becomes (a,z) and a new edge (z,b) is appended."""
        a, b = self.edges[e]
        z = self.add_vertex()
        self.edges[e] = (a, z)
        return z, self.add_edge(z, b)

    def degrees(self):
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def surplus(self):
        return self.n_edges - self.n_vertices + 1

    def is_connected(self):
        if self.n_vertices == 0:
            return False
        _, labels = connected_components(self.adjacency(), directed=False)
        return bool(np.all(labels == labels[0]))

    def validate_seed(self):
        if self.n_edges < 1:
            raise ValidationError("seed graph needs at least one edge")
        if not 0 <= self.root < self.n_vertices:
            raise ValidationError("seed root out of range")
        if not self.is_connected():
            raise ValidationError("seed graph must be connected")
        return self

    def adjacency(self):
        n = self.n_vertices
        if not self.edges:
            return coo_matrix((n, n)).tocsr()
        e = np.asarray(self.edges, dtype=np.int64)
        keep = e[:, 0] != e[:, 1]
        e = e[keep]
        data = np.ones(e.shape[0])
        return coo_matrix((data, (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()

    def distances(self, indices=None):
        """Graph distances by breadth-first search (the direct oracle)."""
        return shortest_path(self.adjacency(), directed=False, unweighted=True, indices=indices)

    def edge_list(self):
        return list(self.edges)


def graph_from_edges(edges, root=0):
    edges = [tuple(e) for e in edges]
    n = 1 + max((max(a, b) for a, b in edges), default=root)
    return MultiGraph(n, edges, root)
