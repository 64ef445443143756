"""Optional numba acceleration and the Fenwick-tree kernels used by samplers.

Every kernel takes its randomness as pre-drawn uniforms, so results do not
depend on whether numba is installed.
"""
import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


@njit(cache=True)
def fenwick_add(tree, i, delta):
    i += 1
    n = tree.shape[0] - 1
    while i <= n:
        tree[i] += delta
        i += i & (-i)


@njit(cache=True)
def fenwick_prefix(tree, i):
    """Sum of the first i weights."""
    s = 0.0
    while i > 0:
        s += tree[i]
        i -= i & (-i)
    return s


@njit(cache=True)
def fenwick_find(tree, weights, target, used):
    """Index j with prefix(j) <= target < prefix(j+1), clamped to a positive weight."""
    n = tree.shape[0] - 1
    step = 1
    while step * 2 <= n:
        step *= 2
    pos = 0
    while step > 0:
        nxt = pos + step
        if nxt <= n and tree[nxt] <= target:
            pos = nxt
            target -= tree[nxt]
        step //= 2
    if pos >= used:
        pos = used - 1
    while pos > 0 and weights[pos] <= 0.0:
        pos -= 1
    return pos


class WeightTree:
    """Fixed-capacity Fenwick tree over nonnegative float weights."""

    def __init__(self, capacity):
        self.tree = np.zeros(capacity + 1)
        self.weights = np.zeros(capacity)
        self.used = 0

    def append(self, w):
        i = self.used
        self.used += 1
        self.set(i, w)
        return i

    def set(self, i, w):
        delta = w - self.weights[i]
        if delta != 0.0:
            self.weights[i] = w
            fenwick_add(self.tree, i, delta)

    def add(self, i, delta):
        self.weights[i] += delta
        fenwick_add(self.tree, i, delta)

    def total(self):
        return fenwick_prefix(self.tree, self.used)

    def find(self, target):
        return int(fenwick_find(self.tree, self.weights, target, self.used))
