"""Addresses on the Ulam tree, plane trees and rays.

An address is a tuple of positive ints; the root is ``()``.
"""
import itertools

from .errors import AddressError, ValidationError

ROOT = ()

# Turn on to validate every PlaneTree on construction (tests enable it).
VALIDATE_TREES = False


def address(word=()):
    u = tuple(int(x) for x in word)
    if any(x < 1 for x in u):
        raise AddressError(f"address letters must be positive: {word!r}")
    return u


def format_address(u):
    return ".".join(str(x) for x in u)


def parse_address(s):
    s = s.strip()
    if s == "":
        return ROOT
    try:
        return address(int(x) for x in s.split("."))
    except ValueError as exc:
        raise AddressError(f"bad address string {s!r}") from exc


def is_prefix(u, v):
    """u is an ancestor of v or equal to it."""
    return len(u) <= len(v) and v[:len(u)] == u


def meet(u, v):
    """Longest common prefix."""
    k = 0
    for a, b in zip(u, v):
        if a != b:
            break
        k += 1
    return u[:k]


def meet_all(addresses):
    it = iter(addresses)
    m = next(it)
    for u in it:
        m = meet(m, u)
    return m


class PlaneTree:
    """Finite prefix-closed, child-contiguous set of addresses.

    Stored as the map of out-degrees; ``order`` keeps insertion order when the
    tree was grown vertex by vertex (u_1, u_2, ...).
    """
    __slots__ = ("_deg", "order")

    def __init__(self, out_degrees=None, order=None, validate=None):
        self._deg = dict(out_degrees) if out_degrees else {ROOT: 0}
        self.order = tuple(order) if order is not None else None
        if validate or (validate is None and VALIDATE_TREES):
            self.validate()

    @classmethod
    def from_addresses(cls, addresses):
        deg = {}
        for u in addresses:
            deg.setdefault(u, 0)
        for u in list(deg):
            if u:
                p = u[:-1]
                if p not in deg:
                    raise ValidationError(f"{format_address(u)} present but parent missing")
                deg[p] = max(deg[p], u[-1])
        return cls(deg)

    @classmethod
    def from_parents(cls, parents):
        """Tree grown by attaching vertex k as rightmost child of parents[k] (parents[0] < 0)."""
        addrs = [ROOT]
        deg = [0]
        for k in range(1, len(parents)):
            p = int(parents[k])
            deg[p] += 1
            addrs.append(addrs[p] + (deg[p],))
            deg.append(0)
        return cls(dict(zip(addrs, deg)), order=addrs)

    def __contains__(self, u):
        return u in self._deg

    def __iter__(self):
        return iter(self._deg)

    def __len__(self):
        return len(self._deg)

    def __eq__(self, other):
        return isinstance(other, PlaneTree) and self._deg == other._deg

    def __repr__(self):
        return f"PlaneTree({sorted(format_address(u) for u in self._deg)})"

    def out_degree(self, u):
        try:
            return self._deg[u]
        except KeyError:
            raise AddressError(f"{format_address(u)!r} not in tree") from None

    @property
    def out_degrees(self):
        return dict(self._deg)

    def children(self, u):
        return [u + (i,) for i in range(1, self.out_degree(u) + 1)]

    def height(self):
        return max(len(u) for u in self._deg)

    def leaves(self):
        return [u for u, d in self._deg.items() if d == 0]

    def validate(self):
        if ROOT not in self._deg:
            raise ValidationError("plane tree must contain the root")
        for u, d in self._deg.items():
            if d < 0:
                raise ValidationError(f"negative out-degree at {format_address(u)}")
            if u and (u[:-1] not in self._deg or self._deg[u[:-1]] < u[-1]):
                raise ValidationError(f"{format_address(u)} breaks prefix closure or contiguity")
            for i in range(1, d + 1):
                if u + (i,) not in self._deg:
                    raise ValidationError(f"child {i} of {format_address(u)} missing")
        return True

    def issubset(self, other):
        return all(u in other for u in self._deg)


def plane_tree_attach(tree, parent):
    """Return (new tree, new address) with a rightmost child added under ``parent``."""
    if parent not in tree:
        raise AddressError(f"{format_address(parent)!r} not in tree")
    deg = tree.out_degrees
    child = parent + (deg[parent] + 1,)
    deg[parent] += 1
    deg[child] = 0
    order = tree.order + (child,) if tree.order is not None else None
    return PlaneTree(deg, order=order), child


def plane_tree_closure(addresses):
    """Smallest plane tree containing the given addresses."""
    deg = {ROOT: 0}
    for u in addresses:
        for k in range(1, len(u) + 1):
            p, i = u[:k - 1], u[k - 1]
            deg[p] = max(deg.get(p, 0), i)
            deg.setdefault(u[:k], 0)
    # fill in left siblings required by contiguity
    stack = [ROOT]
    while stack:
        u = stack.pop()
        for i in range(1, deg[u] + 1):
            c = u + (i,)
            deg.setdefault(c, 0)
            stack.append(c)
    return PlaneTree(deg)


def depth_truncation(tree, depth):
    """Vertices of ``tree`` at height <= depth."""
    keep = {u: 0 for u in tree if len(u) <= depth}
    for u in keep:
        if u:
            keep[u[:-1]] = max(keep[u[:-1]], u[-1])
    return PlaneTree(keep)


class Ray:
    """Infinite word, materialized letter by letter.

    ``generator(prefix)`` returns the next letter given the current prefix.
    """

    def __init__(self, letters=(), generator=None):
        self.letters = list(address(letters))
        self.generator = generator

    @classmethod
    def constant(cls, letter=1):
        return cls((), lambda prefix: letter)

    @classmethod
    def eventually_constant(cls, prefix, letter=1):
        return cls(prefix, lambda p: letter)

    def letter(self, k):
        """The k-th letter (1-indexed)."""
        while len(self.letters) < k:
            if self.generator is None:
                raise AddressError("ray has no generator to extend its letters")
            nxt = int(self.generator(tuple(self.letters)))
            if nxt < 1:
                raise AddressError("ray letters must be positive")
            self.letters.append(nxt)
        return self.letters[k - 1]

    def prefixes(self):
        for k in itertools.count():
            yield ray_truncate(self, k)


def ray_truncate(ray, k):
    if k < 0:
        raise AddressError("truncation length must be nonnegative")
    if k:
        ray.letter(k)
    return tuple(ray.letters[:k])


class AddressIndex:
    """Interning table: dense integer ids for addresses."""

    def __init__(self, addresses=()):
        self._ids = {}
        self.addresses = []
        for u in addresses:
            self.intern(u)

    def intern(self, u):
        i = self._ids.get(u)
        if i is None:
            i = self._ids[u] = len(self.addresses)
            self.addresses.append(u)
        return i

    def __getitem__(self, u):
        return self._ids[u]

    def __len__(self):
        return len(self.addresses)
