"""Blocks, decorations and their gluing along the Ulam tree.

A decoration assigns a finite rooted metric space (a block) to each address.
Gluing identifies the root of block ``u+(i,)`` with the i-th attach point of
block ``u`` (or with the root of ``u`` when fewer attach points exist).
Distances are sums of within-block distances along the two ancestral paths
from the meet of the endpoints.
"""
from collections import namedtuple
from dataclasses import dataclass
import io
import math
import threading

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import CertificationError, HandleError, ValidationError
from .ulam import (ROOT, PlaneTree, format_address, is_prefix, meet, parse_address,
                   plane_tree_closure, ray_truncate)

Point = namedtuple("Point", "address index")
LeafHandle = namedtuple("LeafHandle", "point radius depth")


class Interval(namedtuple("Interval", "center radius")):
    @property
    def lo(self):
        return max(0.0, self.center - self.radius)

    @property
    def hi(self):
        return self.center + self.radius

    def __contains__(self, x):
        return self.lo - 1e-12 <= x <= self.hi + 1e-12


# ---------------------------------------------------------------- blocks

def _find_triangle_violation(d, tol):
    n = d.shape[0]
    for k in range(n):
        bad = d > d[:, k:k + 1] + d[k:k + 1, :] + tol
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return int(i), int(k), int(j)
    return None


class Block:
    """Finite rooted metric space with ordered attach points.

    Give either ``edges`` (list of (i, j, w); distances are shortest paths)
    or ``matrix`` (explicit distances).  With neither, the points must be a
    single point.
    """

    def __init__(self, n_points=1, root=0, attach=(), masses=None, edges=None, matrix=None,
                 validate=True, exhaustive_limit=600):
        self.n_points = int(n_points)
        self.root = int(root)
        self.attach = tuple(int(x) for x in attach)
        self.masses = None if masses is None else np.asarray(masses, dtype=float)
        self.edges = None
        self.matrix = None
        self._rows = {}
        self._lock = threading.Lock()
        self._diam = None
        if matrix is not None:
            self.matrix = np.array(matrix, dtype=float)
            self.n_points = self.matrix.shape[0]
            self.kind = "matrix"
        else:
            self.edges = [] if edges is None else [(int(i), int(j), float(w)) for i, j, w in edges]
            self.kind = "graph"
        if validate:
            self._validate(exhaustive_limit)

    def _validate(self, exhaustive_limit):
        n = self.n_points
        if n < 1:
            raise ValidationError("block needs at least one point")
        for x in (self.root,) + self.attach:
            if not 0 <= x < n:
                raise ValidationError(f"point index {x} out of range for {n} points")
        if self.masses is not None and (self.masses.shape != (n,) or np.any(self.masses < 0)):
            raise ValidationError("masses must be one nonnegative value per point")
        if self.kind == "matrix":
            d = self.matrix
            if d.shape != (n, n):
                raise ValidationError("distance matrix must be square")
            if not np.all(np.isfinite(d)) or np.any(d < 0):
                raise ValidationError("distances must be finite and nonnegative")
            if np.any(np.diag(d) != 0):
                raise ValidationError("distance matrix must have zero diagonal")
            scale = max(1.0, float(d.max()))
            if np.any(np.abs(d - d.T) > 1e-12 * scale):
                i, j = np.argwhere(np.abs(d - d.T) > 1e-12 * scale)[0]
                raise ValidationError(f"asymmetric distances at ({i}, {j})")
            if n <= exhaustive_limit:
                bad = _find_triangle_violation(d, 1e-12 * scale)
            else:
                bad = self._sampled_triangle_check(d, 1e-12 * scale)
            if bad is not None:
                raise ValidationError(f"triangle inequality fails for triple {bad}")
        else:
            for i, j, w in self.edges:
                if not (0 <= i < n and 0 <= j < n):
                    raise ValidationError(f"edge ({i}, {j}) has an endpoint out of range")
                if not (w >= 0 and math.isfinite(w)):
                    raise ValidationError(f"edge ({i}, {j}) has invalid length {w}")
            if n > 1 and not np.all(np.isfinite(self.row(self.root))):
                raise ValidationError("graph block must be connected")

    @staticmethod
    def _sampled_triangle_check(d, tol, samples=10**6, seed=0):
        rng = np.random.default_rng(seed)
        n = d.shape[0]
        i, j, k = rng.integers(0, n, size=(3, samples))
        bad = np.nonzero(d[i, j] > d[i, k] + d[k, j] + tol)[0]
        if bad.size:
            b = bad[0]
            return int(i[b]), int(k[b]), int(j[b])
        return None

    # -- distances
    def _graph_rows(self, sources):
        n = self.n_points
        if not self.edges:
            return np.where(np.arange(n)[None, :] == np.asarray(sources)[:, None], 0.0, np.inf)
        e = np.array([(i, j, w) for i, j, w in self.edges if i != j], dtype=float).reshape(-1, 3)
        i, j, w = e[:, 0].astype(np.int64), e[:, 1].astype(np.int64), e[:, 2]
        # zero-length edges identify points: contract them before running Dijkstra
        comp = np.arange(n)

        def find(x):
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x
        for a, b in zip(i[w == 0], j[w == 0]):
            ra, rb = find(a), find(b)
            if ra != rb:
                comp[max(ra, rb)] = min(ra, rb)
        rep = np.array([find(x) for x in range(n)])
        keep = w > 0
        a, b, w = rep[i[keep]], rep[j[keep]], w[keep]
        keep = a != b
        a, b, w = a[keep], b[keep], w[keep]
        # multi-edges: keep the shortest copy
        order = np.lexsort((w, b, a))
        a, b, w = a[order], b[order], w[order]
        first = np.ones(a.size, dtype=bool)
        first[1:] = (a[1:] != a[:-1]) | (b[1:] != b[:-1])
        g = coo_matrix((w[first], (a[first], b[first])), shape=(n, n)).tocsr()
        rows = dijkstra(g, directed=False, indices=rep[np.asarray(sources)])
        return rows[:, rep]

    def row(self, i):
        """Distances from point i to every point."""
        r = self._rows.get(i)
        if r is None:
            if self.kind == "matrix":
                r = self.matrix[i]
            else:
                r = self._graph_rows([i])[0]
            with self._lock:
                self._rows[i] = r
        return r

    def submatrix(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        if self.kind == "matrix":
            return self.matrix[np.ix_(idx, idx)]
        uniq, inv = np.unique(idx, return_inverse=True)
        missing = [int(x) for x in uniq if int(x) not in self._rows]
        if missing:
            rows = self._graph_rows(missing)
            with self._lock:
                for x, r in zip(missing, rows):
                    self._rows[x] = r
        sub = np.stack([self._rows[int(x)][uniq] for x in uniq])
        return sub[np.ix_(inv, inv)]

    def distance(self, i, j):
        return float(self.row(i)[j])

    def full_matrix(self):
        if self.kind == "matrix":
            return self.matrix
        return self._graph_rows(np.arange(self.n_points))

    def diameter(self):
        if self._diam is None:
            if self.n_points == 1:
                self._diam = 0.0
            elif self.kind == "matrix":
                self._diam = float(self.matrix.max())
            elif self.n_points <= 2000:
                self._diam = float(self.full_matrix().max())
            else:
                # trees and most sparse graphs: 2-sweep from the root is exact on trees,
                # and the bound 2*ecc(root) is always valid; keep the valid one.
                self._diam = 2.0 * float(self.row(self.root).max())
        return self._diam

    def attach_index(self, letter):
        """Point index glued to child ``letter`` (the root when past the attach list)."""
        if letter <= len(self.attach):
            return self.attach[letter - 1]
        return self.root

    def total_mass(self):
        return 0.0 if self.masses is None else float(self.masses.sum())

    def scaled(self, a):
        a = float(a)
        if a < 0:
            raise ValidationError("scale factor must be nonnegative")
        if self.kind == "matrix":
            return Block(root=self.root, attach=self.attach, masses=self.masses,
                         matrix=self.matrix * a, validate=False)
        return Block(self.n_points, self.root, self.attach, self.masses,
                     edges=[(i, j, w * a) for i, j, w in self.edges], validate=False)

    def with_attach(self, attach):
        blk = Block.__new__(Block)
        blk.__dict__.update(self.__dict__)
        blk.attach = tuple(int(x) for x in attach)
        blk._lock = threading.Lock()
        blk._rows = self._rows
        return blk

    def is_trivial(self):
        return self.n_points == 1


TRIVIAL = Block()


def make_block(spec):
    """Validated block from a dict spec.

    Keys: ``kind`` ('graph' or 'matrix'), ``n_points``, ``edges`` (i, j[, w]),
    ``matrix``, ``root``, ``attach``, ``masses``.
    """
    spec = dict(spec)
    kind = spec.get("kind", "matrix" if "matrix" in spec else "graph")
    common = dict(root=spec.get("root", 0), attach=spec.get("attach", ()), masses=spec.get("masses"))
    if kind == "matrix":
        return Block(matrix=spec["matrix"], **common)
    if kind != "graph":
        raise ValidationError(f"unknown block kind {kind!r}")
    edges = [(e[0], e[1], e[2] if len(e) > 2 else 1.0) for e in spec.get("edges", ())]
    n = spec.get("n_points")
    if n is None:
        n = 1 + max([max(i, j) for i, j, _ in edges], default=0)
    return Block(n, edges=edges, **common)


def segment_block(length, attach_positions=(), root_position=0.0, masses=None, extra_positions=()):
    """Point cloud on a segment: root first, then attach points, then extra points."""
    pos = np.concatenate([[root_position], np.asarray(attach_positions, float),
                          np.asarray(extra_positions, float)])
    if np.any(pos < -1e-15) or np.any(pos > length + 1e-12):
        raise ValidationError("positions must lie on the segment")
    k = len(attach_positions)
    return Block(matrix=np.abs(pos[:, None] - pos[None, :]), root=0, attach=range(1, k + 1),
                 masses=masses, validate=False)


def circle_block(circumference, attach_positions=(), extra_positions=(), masses=None):
    """Point cloud on a circle with arc metric; the root sits at position 0."""
    pos = np.concatenate([[0.0], np.asarray(attach_positions, float), np.asarray(extra_positions, float)])
    diff = np.abs(pos[:, None] - pos[None, :])
    d = np.minimum(diff, circumference - diff) if circumference > 0 else diff * 0
    k = len(attach_positions)
    return Block(matrix=d, root=0, attach=range(1, k + 1), masses=masses, validate=False)


# ---------------------------------------------------------------- decorations

class Decoration:
    """Sparse map address -> block; absent addresses carry the one-point block.

    ``generator(u)`` (optional) produces blocks for addresses not in ``blocks``
    on demand, making the decoration possibly infinite.  For such decorations
    ``tail_bound(u, first_child)`` must bound, over rays through u*(i) with
    i >= first_child (or through u itself when first_child is None), the sum of
    diameters of the blocks met at or below that point.
    """

    def __init__(self, blocks=None, generator=None, tail_bound=None):
        self._blocks = dict(blocks or {})
        self.generator = generator
        self._tail_bound = tail_bound
        self._tails = None
        self._lock = threading.Lock()

    def block(self, u):
        b = self._blocks.get(u)
        if b is None:
            if self.generator is None:
                return TRIVIAL
            b = self.generator(u)
            b = TRIVIAL if b is None else b
            with self._lock:
                self._blocks.setdefault(u, b)
        return b

    def __getitem__(self, u):
        return self.block(u)

    @property
    def is_finite(self):
        return self.generator is None

    def materialized(self):
        return {u: b for u, b in self._blocks.items() if not b.is_trivial()}

    def addresses(self):
        return sorted(self.materialized())

    def support(self):
        return plane_tree_closure(self.addresses())

    def diameters(self):
        return {u: b.diameter() for u, b in self.materialized().items()}

    def scaled(self, a):
        gen = None
        if self.generator is not None:
            gen = lambda u, g=self.generator: (lambda b: None if b is None else b.scaled(a))(g(u))
        tb = None
        if self._tail_bound is not None:
            tb = lambda u, first_child=None, f=self._tail_bound: a * f(u, first_child)
        return Decoration({u: b.scaled(a) for u, b in self._blocks.items()}, gen, tb)

    def restrict(self, theta):
        return Decoration({u: b for u, b in self.materialized().items() if u in theta})

    def points(self, theta=None):
        """One handle per glued point (child roots are represented by the parent's point)."""
        pts = []
        addrs = self.addresses()
        if ROOT not in addrs:
            addrs = [ROOT] + addrs
        for u in addrs:
            if theta is not None and u not in theta:
                continue
            b = self.block(u)
            for i in range(b.n_points):
                if u == ROOT or i != b.root:
                    pts.append(Point(u, i))
        return pts

    def tail(self, u, first_child=None):
        """Sup over rays through u (or through u*(i), i >= first_child) of summed diameters."""
        if not self.is_finite:
            if self._tail_bound is None:
                raise CertificationError("open decoration without a tail bound")
            return float(self._tail_bound(u, first_child))
        if self._tails is None:
            tails = {}
            diam = self.diameters()
            for v in sorted(self.support(), key=len, reverse=True):
                kids = [c for c in _children_in(self._support_cache(), v)]
                tails[v] = diam.get(v, 0.0) + max((tails[c] for c in kids), default=0.0)
            self._tails = tails
        if first_child is None:
            return self._tails.get(u, 0.0)
        deg = self._support_cache().out_degree(u) if u in self._support_cache() else 0
        return max((self._tails.get(u + (i,), 0.0) for i in range(first_child, deg + 1)), default=0.0)

    def _support_cache(self):
        if not hasattr(self, "_support") or self._support is None:
            self._support = self.support()
        return self._support


def _children_in(tree, u):
    return [u + (i,) for i in range(1, tree.out_degree(u) + 1)] if u in tree else []


# ---------------------------------------------------------------- glued spaces

class GluedSpace:
    """Gluing of a decoration, optionally restricted to a plane tree ``theta``."""

    def __init__(self, decoration, theta=None):
        self.decoration = decoration
        self.theta = theta

    def check(self, p):
        u, i = p
        if self.theta is not None and u not in self.theta:
            raise HandleError(f"address {format_address(u)!r} outside the truncation")
        b = self.decoration.block(u)
        if not 0 <= i < b.n_points:
            raise HandleError(f"point {i} does not exist in block {format_address(u)!r}")
        return b

    def _coord(self, u, letter):
        return self.decoration.block(u).attach_index(letter)

    def distance(self, p, q):
        p, q = Point(*p), Point(*q)
        bp, bq = self.check(p), self.check(q)
        w, v = p.address, q.address
        if w == v:
            return bp.distance(p.index, q.index)
        m = len(meet(w, v))
        mu = w[:m]
        a = p.index if len(w) == m else self._coord(mu, w[m])
        b = q.index if len(v) == m else self._coord(mu, v[m])
        total = self.decoration.block(mu).distance(a, b)
        for addr, idx in ((w, p.index), (v, q.index)):
            for depth in range(m + 1, len(addr) + 1):
                u = addr[:depth]
                blk = self.decoration.block(u)
                y = idx if depth == len(addr) else blk.attach_index(addr[depth])
                total += blk.distance(blk.root, y)
        return total

    def root_distance(self, p):
        return self.distance(Point(ROOT, self.decoration.block(ROOT).root), p)

    def distances(self, handles):
        """All pairwise distances between handles, batched over the address trie."""
        handles = [Point(*h) for h in handles]
        for h in handles:
            self.check(h)
        n = len(handles)
        out = np.zeros((n, n))
        addr = [h.address for h in handles]
        index = np.array([h.index for h in handles], dtype=np.int64)
        self._fill(ROOT, np.arange(n), addr, index, out)
        return out

    def _fill(self, u, idx, addr, index, out):
        d = len(u)
        blk = self.decoration.block(u)
        y = np.empty(idx.size, dtype=np.int64)
        r = np.zeros(idx.size)
        group = np.empty(idx.size, dtype=np.int64)
        by_child = {}
        for pos, k in enumerate(idx):
            w = addr[k]
            if len(w) == d:
                y[pos] = index[k]
                group[pos] = -1 - pos
            else:
                c = w[d]
                y[pos] = blk.attach_index(c)
                group[pos] = c
                by_child.setdefault(c, []).append(pos)
        for c, positions in by_child.items():
            positions = np.array(positions)
            r[positions] = self._fill(u + (c,), idx[positions], addr, index, out)
        if idx.size > 1:
            sub = blk.submatrix(y) + r[:, None] + r[None, :]
            mask = group[:, None] != group[None, :]
            cur = out[np.ix_(idx, idx)]
            out[np.ix_(idx, idx)] = np.where(mask, sub, cur)
        return blk.row(blk.root)[y] + r


def glue_distance(space, p, q):
    return space.distance(p, q)


def glue_finite(theta, dec):
    return GluedSpace(dec, theta)


# ---------------------------------------------------------------- non-explosion

def nonexplosion_tail(lengths, theta, inclusive=True, tail=None):
    """sup_u of the sum of lengths over ancestors v of u with v outside theta.

    ``inclusive`` sums over v <= u, otherwise over strict ancestors v < u
    (the sup is then taken over the support only).  ``tail`` maps an address
    to a bound on the further sum strictly below it along any ray, for
    lengths not listed explicitly.
    """
    tail = tail or {}
    vals = list(lengths.values()) + list(tail.values())
    if any(not math.isfinite(x) or x < 0 for x in vals):
        raise CertificationError("lengths must be finite and nonnegative")
    addrs = set(lengths) | set(tail)
    best = 0.0
    for u in addrs:
        s = 0.0
        top = len(u) + 1 if inclusive else len(u)
        for k in range(top):
            v = u[:k]
            if v not in theta:
                s += lengths.get(v, 0.0)
        if inclusive:
            s += tail.get(u, 0.0)
        best = max(best, s)
    return best


@dataclass
class Certificate:
    certified: bool
    epsilon: float
    K: float
    detail: str = ""

    def __bool__(self):
        return self.certified


def nonexplosion_sufficient(diams, heights, epsilon=None, K=None, slack=0.05):
    """Empirical check of x_n <= (n+1)^(-eps+o(1)) and h(u_n) <= K log n.

    Fits eps from the running upper envelope of log x_n against log(n+1), and K
    as the slope of the running max of h(u_n) against log n.
    """
    x = np.asarray(diams, dtype=float)
    h = np.asarray(heights, dtype=float)
    n = np.arange(1, x.size + 1)
    pos = x > 0
    if not pos.any():
        eps = math.inf
    else:
        env = np.maximum.accumulate(x[::-1])[::-1]
        keep = env > 0
        slope = np.polyfit(np.log(n[keep] + 1.0), np.log(env[keep]), 1)[0]
        eps = -float(slope)
    sel = n >= 2
    hk = np.maximum.accumulate(h)[sel]
    k_fit = float(np.polyfit(np.log(n[sel]), hk, 1)[0]) if sel.sum() >= 2 else 0.0
    ok = eps > 0
    if epsilon is not None:
        ok = ok and eps >= epsilon * (1 - slack)
    if K is not None:
        ok = ok and k_fit <= K * (1 + slack)
    return Certificate(bool(ok), eps, k_fit, f"fit over n=1..{x.size}")


def truncation_gap_bound(dec, theta, inclusive=True):
    """Certified bound on the Hausdorff gap between the theta-truncated and full gluings."""
    if dec.is_finite:
        return nonexplosion_tail(dec.diameters(), theta, inclusive=inclusive)
    best = 0.0
    for u in theta:
        best = max(best, dec.tail(u, theta.out_degree(u) + 1))
    return best


def leaf_embed(space, ray, tolerance, max_depth=10**4):
    """Handle for the limit point of the attach points along ``ray``.

    Walks down until the certified tail below the current address is at most
    ``tolerance``; the returned radius bounds the distance from the handle's
    point to the true leaf.
    """
    dec = space.decoration
    for k in range(max_depth + 1):
        u = ray_truncate(ray, k)
        t = dec.tail(u)
        if t <= tolerance:
            if k == 0:
                pt = Point(ROOT, dec.block(ROOT).root)
            else:
                pt = Point(u[:-1], dec.block(u[:-1]).attach_index(u[-1]))
            return LeafHandle(pt, t, k)
    raise CertificationError(f"tail along the ray stays above {tolerance} up to depth {max_depth}")


def leaf_distance(space, leaf, q):
    """Interval containing the distance between a leaf handle and a point or leaf."""
    if isinstance(q, LeafHandle):
        return Interval(space.distance(leaf.point, q.point), leaf.radius + q.radius)
    return Interval(space.distance(leaf.point, q), leaf.radius)


# ---------------------------------------------------------------- measures

class MeasureOnUlam:
    """Finite measure on addresses: atoms plus masses of subtrees T(u)."""

    def __init__(self, atoms=None, subtree=None):
        self.atoms = {u: float(m) for u, m in (atoms or {}).items() if m != 0}
        if subtree is None:
            subtree = {}
            for u, m in self.atoms.items():
                for k in range(len(u) + 1):
                    subtree[u[:k]] = subtree.get(u[:k], 0.0) + m
        self.subtree = dict(subtree)

    def mass(self, u):
        return self.atoms.get(u, 0.0)

    def subtree_mass(self, u):
        return self.subtree.get(u, 0.0)

    def total(self):
        return self.subtree.get(ROOT, sum(self.atoms.values()))


def pushforward_measure(dec):
    atoms = {}
    for u, b in dec.materialized().items():
        if b.masses is not None:
            atoms[u] = b.total_mass()
    return MeasureOnUlam(atoms)


def measure_distance(m1, m2, theta, tol=1e-9):
    """max over u in theta of |m1({u}) - m2({u})| and |m1(T(u)) - m2(T(u))|."""
    for m in (m1, m2):
        if abs(m.total() - 1.0) > tol:
            raise ValidationError(f"not a probability measure (total {m.total()})")
    best = 0.0
    for u in theta:
        best = max(best, abs(m1.mass(u) - m2.mass(u)), abs(m1.subtree_mass(u) - m2.subtree_mass(u)))
    return best


# ---------------------------------------------------------------- file format

FORMAT_VERSION = 1


def write_decoration(dec, out):
    """Line-oriented text serialization; ``out`` is a path or a text stream."""
    if isinstance(out, str):
        with open(out, "w") as fh:
            return write_decoration(dec, fh)
    blocks = dec.materialized()
    if ROOT not in blocks and dec.block(ROOT) is not TRIVIAL:
        blocks[ROOT] = dec.block(ROOT)
    out.write("# pagraphs decoration\n")
    out.write(f"version {FORMAT_VERSION}\n")
    out.write(f"blocks {len(blocks)}\n")
    for u in sorted(blocks):
        b = blocks[u]
        out.write(f"block address={format_address(u)} kind={b.kind} points={b.n_points} root={b.root}\n")
        out.write("attach" + "".join(f" {x}" for x in b.attach) + "\n")
        if b.masses is None:
            out.write("masses -\n")
        else:
            out.write("masses" + "".join(f" {m!r}" for m in b.masses.tolist()) + "\n")
        if b.kind == "graph":
            out.write(f"edges {len(b.edges)}\n")
            for i, j, w in b.edges:
                out.write(f"{i} {j} {w!r}\n")
        else:
            out.write(f"rows {b.n_points}\n")
            for row in b.matrix.tolist():
                out.write(" ".join(repr(x) for x in row) + "\n")
        out.write("end\n")


def read_decoration(src):
    if isinstance(src, str):
        with open(src) as fh:
            return read_decoration(fh)
    lines = [ln.rstrip("\n") for ln in src if not ln.startswith("#")]
    it = iter(lines)

    def expect(prefix):
        ln = next(it)
        if not ln.startswith(prefix):
            raise ValidationError(f"expected {prefix!r}, got {ln!r}")
        return ln[len(prefix):].strip()

    version = int(expect("version"))
    if version != FORMAT_VERSION:
        raise ValidationError(f"unsupported decoration format version {version}")
    count = int(expect("blocks"))
    blocks = {}
    for _ in range(count):
        fields = dict(tok.split("=", 1) for tok in expect("block").split())
        u = parse_address(fields["address"])
        attach = [int(x) for x in expect("attach").split()]
        ms = expect("masses")
        masses = None if ms == "-" else [float(x) for x in ms.split()]
        if fields["kind"] == "graph":
            ne = int(expect("edges"))
            edges = []
            for _ in range(ne):
                i, j, w = next(it).split()
                edges.append((int(i), int(j), float(w)))
            blk = Block(int(fields["points"]), int(fields["root"]), attach, masses, edges=edges)
        else:
            nr = int(expect("rows"))
            rows = [[float(x) for x in next(it).split()] for _ in range(nr)]
            blk = Block(root=int(fields["root"]), attach=attach, masses=masses, matrix=rows)
        expect("end")
        blocks[u] = blk
    return Decoration(blocks)


def decoration_to_string(dec):
    buf = io.StringIO()
    write_decoration(dec, buf)
    return buf.getvalue()


def fused_graph(dec, theta=None):
    """Explicit fused graph of a finite graph-block decoration (oracle helper).

    Returns (n_vertices, edges, handle->vertex map) where every child root is
    merged with the parent's attach point.
    """
    vid = {}
    n = 0
    addrs = sorted(set(dec.addresses()) | {ROOT})
    if theta is not None:
        addrs = [u for u in addrs if u in theta]
    for u in addrs:
        b = dec.block(u)
        for i in range(b.n_points):
            if u != ROOT and i == b.root:
                continue
            vid[(u, i)] = n
            n += 1

    def vertex(u, i):
        while True:
            if (u, i) in vid:
                return vid[(u, i)]
            b = dec.block(u)
            if i != b.root or u == ROOT:
                raise HandleError(f"no vertex for {(u, i)}")
            u, i = u[:-1], dec.block(u[:-1]).attach_index(u[-1])

    edges = []
    for u in addrs:
        b = dec.block(u)
        if b.kind == "graph":
            for i, j, w in b.edges:
                edges.append((vertex(u, i), vertex(u, j), w))
        else:
            m = b.matrix
            for i in range(b.n_points):
                for j in range(i + 1, b.n_points):
                    edges.append((vertex(u, i), vertex(u, j), m[i, j]))
    return n, edges, vertex
