"""Weighted recursive trees and affine preferential attachment trees.

Trees are stored as parent arrays in creation order: vertex k (0-based) is
u_{k+1}, and parents[k] < k.
"""
from dataclasses import dataclass
import math

import numpy as np

from .._jit import fenwick_add, fenwick_find, njit
from ..errors import ParameterError, ValidationError
from ..glue import MeasureOnUlam
from ..ulam import ROOT, PlaneTree


class FitnessSequence:
    """Initial fitnesses a_1, a_2, ... with declared growth constants.

    ``values`` is an array (extended periodically from its last ``period``
    entries when longer prefixes are needed) or a callable k -> a_k (1-based).
    """

    def __init__(self, values, c=None, c_prime=0.0, eps=None, period=1):
        self._fn = values if callable(values) else None
        self._arr = None if callable(values) else np.asarray(values, dtype=float)
        self.period = int(period)
        self.c = c
        self.c_prime = c_prime
        self.eps = eps
        first = self.array(min(2, self._len_hint()) if self._arr is not None else 2)
        if not first[0] > -1:
            raise ParameterError(f"a_1 must exceed -1, got {first[0]}")

    @classmethod
    def constant(cls, a, b=None):
        """a, b, b, b, ... (b defaults to a)."""
        b = a if b is None else b
        return cls([a, b], c=float(b), c_prime=0.0, eps=1.0)

    def _len_hint(self):
        return self._arr.size

    def array(self, n):
        if self._fn is not None:
            out = np.array([self._fn(k) for k in range(1, n + 1)], dtype=float)
        elif n <= self._arr.size:
            out = self._arr[:n].copy()
        else:
            tail = self._arr[self._arr.size - self.period:]
            reps = math.ceil((n - self._arr.size) / self.period)
            out = np.concatenate([self._arr, np.tile(tail, reps)])[:n]
        if np.any(out[1:] < 0):
            raise ParameterError("fitnesses a_n for n >= 2 must be nonnegative")
        return out

    def __getitem__(self, k):
        return float(self.array(k)[k - 1])

    def fitted_constants(self, n=10**5):
        """(c, c') fitted from A_n / n and log max a_k / log k on the first n terms."""
        a = self.array(n)
        k = np.arange(1, n + 1)
        c = float(np.cumsum(a)[-1] / n)
        big = k >= 10
        ratio = np.log(np.maximum(a[big], 1e-300)) / np.log(k[big])
        tail = ratio[ratio.size // 2:]
        cp = max(0.0, float(tail.max())) if tail.size else 0.0
        return c, cp

    def validate(self, n=10**5, rel=0.05, slack=0.05):
        c, cp = self.fitted_constants(n)
        if self.c is not None and abs(c - self.c) > rel * self.c:
            raise ValidationError(f"declared c={self.c} but A_n/n={c:.4g} at n={n}")
        if not cp < 1.0 / (c + 1.0) + slack:
            raise ValidationError(f"fitted c'={cp:.3g} not below 1/(c+1)={1 / (c + 1):.3g}")
        if self.c_prime is not None and cp > self.c_prime + slack:
            raise ValidationError(f"declared c'={self.c_prime} but fitted {cp:.3g}")
        return c, cp


@dataclass
class RecursiveTree:
    """Growing plane tree u_1, u_2, ... (vertex k attached as rightmost child)."""
    parents: np.ndarray

    def __len__(self):
        return self.parents.size

    def out_degrees(self, m=None):
        m = self.parents.size if m is None else m
        return np.bincount(self.parents[1:m], minlength=m).astype(np.int64)

    def depths(self, m=None):
        m = self.parents.size if m is None else m
        return _depths(self.parents[:m])

    def height(self, m=None):
        return int(self.depths(m).max())

    def addresses(self, m=None):
        m = self.parents.size if m is None else m
        addrs = [ROOT]
        deg = np.zeros(m, dtype=np.int64)
        for k in range(1, m):
            p = self.parents[k]
            deg[p] += 1
            addrs.append(addrs[p] + (int(deg[p]),))
        return addrs

    def plane_tree(self, m=None):
        m = self.parents.size if m is None else m
        return PlaneTree.from_parents(self.parents[:m])

    def subtree_sums(self, values, m=None):
        """For each vertex, the sum of ``values`` over its subtree (itself included)."""
        m = self.parents.size if m is None else m
        return _subtree_sums(self.parents[:m], np.asarray(values[:m], dtype=float).copy())


@njit(cache=True)
def _depths(parents):
    d = np.zeros(parents.shape[0], dtype=np.int64)
    for k in range(1, parents.shape[0]):
        d[k] = d[parents[k]] + 1
    return d


@njit(cache=True)
def _subtree_sums(parents, acc):
    for k in range(parents.shape[0] - 1, 0, -1):
        acc[parents[k]] += acc[k]
    return acc


def wrt_grow(weights, n, rng):
    """WRT((w_k)): vertex m+1 picks its parent among u_1..u_m with probability ∝ w_k."""
    w = np.asarray(weights, dtype=float)[:n]
    if w.size < n - 1:
        raise ParameterError(f"need at least {n - 1} weights for {n} vertices")
    if n < 1:
        raise ParameterError("n must be at least 1")
    if not w[0] > 0 or np.any(w < 0):
        raise ParameterError("weights need w_1 > 0 and w_k >= 0")
    parents = np.full(n, -1, dtype=np.int64)
    if n > 1:
        cum = np.cumsum(w[:n - 1])
        x = rng.random(n - 1) * cum
        parents[1:] = np.searchsorted(cum, x, side="right")
        # the right side of a zero-width gap can only happen at floating ties
        np.minimum(parents[1:], np.arange(n - 1), out=parents[1:])
    return RecursiveTree(parents)


@njit(cache=True)
def _pa_kernel(a, u, parents, tree, weights):
    n = parents.shape[0]
    parents[0] = -1
    if n == 1:
        return
    parents[1] = 0
    fenwick_add(tree, 0, a[0] + 1.0)
    weights[0] = a[0] + 1.0
    fenwick_add(tree, 1, a[1])
    weights[1] = a[1]
    total = a[0] + 1.0 + a[1]
    for m in range(2, n):
        # vertices 0..m-1 present
        p = fenwick_find(tree, weights, u[m - 2] * total, m)
        parents[m] = p
        weights[p] += 1.0
        fenwick_add(tree, p, 1.0)
        weights[m] = a[m]
        fenwick_add(tree, m, a[m])
        total += 1.0 + a[m]


def pa_grow(fitness, n, rng):
    """PA((a_k)): parent chosen ∝ out-degree + a_k; u_2 always attaches to u_1."""
    if not isinstance(fitness, FitnessSequence):
        fitness = FitnessSequence(fitness)
    if n < 1:
        raise ParameterError("n must be at least 1")
    a = fitness.array(n)
    parents = np.empty(n, dtype=np.int64)
    _pa_kernel(a, rng.random(max(n - 2, 0)), parents, np.zeros(n + 1), np.zeros(n))
    return RecursiveTree(parents)


# ---------------------------------------------------------------- measures

def _measure_from_atoms(tree, atoms_by_vertex, m):
    addrs = tree.addresses(m)
    sub = tree.subtree_sums(atoms_by_vertex, m)
    return MeasureOnUlam({addrs[k]: float(atoms_by_vertex[k]) for k in range(m)},
                         subtree={addrs[k]: float(sub[k]) for k in range(m)})


def uniform_measure(tree, m=None):
    """nu_m: uniform on u_1..u_m."""
    m = len(tree) if m is None else m
    return _measure_from_atoms(tree, np.full(m, 1.0 / m), m)


def weight_measure(tree, weights, m=None):
    """mu_m(u_k) = w_k / W_m."""
    m = len(tree) if m is None else m
    w = np.asarray(weights[:m], dtype=float)
    return _measure_from_atoms(tree, w / w.sum(), m)


def degree_measure(tree, b_seq, m=None):
    """eta_m(u_k) = (b_k + out-degree(u_k)) / (B_m + m - 1)."""
    m = len(tree) if m is None else m
    b = np.asarray(b_seq.array(m) if isinstance(b_seq, FitnessSequence) else b_seq[:m], dtype=float)
    if b.size < m:
        raise ParameterError("b sequence shorter than the tree")
    if not b[0] > -1 or np.any(b[1:] < 0):
        raise ParameterError("need b_1 > -1 and b_k >= 0")
    if m == 1:
        return _measure_from_atoms(tree, np.ones(1), 1)
    atoms = (b + tree.out_degrees(m)) / (b.sum() + m - 1)
    return _measure_from_atoms(tree, atoms, m)


def split_proportions(tree, weights, parent=0, m=None):
    """p_{ui} = mu(T(ui)) / mu(T(u)) for the children of vertex ``parent`` (0-based)."""
    m = len(tree) if m is None else m
    sub = tree.subtree_sums(np.asarray(weights[:m], float), m)
    kids = np.nonzero(tree.parents[:m] == parent)[0]
    return sub[kids] / sub[parent]
