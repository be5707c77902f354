"""Partitions, (v, w)-tuples of partitions and admissible trees.

Boxes are ``(x, y)`` pairs with ``x`` the part (row) index and ``y`` the
position inside the part, both 1-based.  Vertices and framing slots are
1-based as well.
"""

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .errors import ValidationError


def partitions_of(n, max_part=None):
    """All partitions of ``n`` as tuples, in reverse lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions_of(n - first, first):
            out.append((first,) + rest)
    return out


def boxes(parts):
    return [(x, y) for x, row in enumerate(parts, 1) for y in range(1, row + 1)]


def contains(parts, box):
    x, y = box
    return 1 <= x <= len(parts) and 1 <= y <= parts[x - 1]


def content_multiplicities(parts):
    """Map content ``x - y`` -> number of boxes."""
    m = {}
    for x, y in boxes(parts):
        m[x - y] = m.get(x - y, 0) + 1
    return m


@dataclass(frozen=True)
class LabeledPartition:
    """A partition attached to framing slot ``slot`` of vertex ``vertex``."""

    parts: tuple
    vertex: int
    slot: int

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise ValidationError("not a partition: %r" % (self.parts,))
        object.__setattr__(self, "parts", parts)

    @property
    def size(self):
        return sum(self.parts)

    def boxes(self):
        return boxes(self.parts)

    def content(self, box):
        x, y = box
        return x - y + self.vertex

    def to_text(self):
        return "[[%s],%d,%d]" % (",".join(map(str, self.parts)), self.vertex, self.slot)

    def to_json(self):
        return [list(self.parts), self.vertex, self.slot]


@dataclass(frozen=True)
class FixedPoint:
    """A (v, w)-tuple of partitions, one per framing slot in (vertex, slot) order."""

    parts: tuple

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def residue_counts(self, r):
        counts = [0] * r
        for lp in self.parts:
            for b in lp.boxes():
                counts[(lp.content(b) - 1) % r] += 1
        return counts

    def all_boxes(self):
        """``(part index, box)`` pairs sorted by part then (x, y)."""
        return [(k, b) for k, lp in enumerate(self.parts) for b in lp.boxes()]

    def to_text(self):
        return "[%s]" % ",".join(lp.to_text() for lp in self.parts)

    def to_json(self):
        return [lp.to_json() for lp in self.parts]

    def __str__(self):
        return self.to_text()

    @classmethod
    def from_json(cls, data):
        return cls(tuple(LabeledPartition(tuple(p), int(i), int(j)) for p, i, j in data))


def residue(content, r):
    """Reduce a content into the 1-based range [1, r]."""
    return (content - 1) % r + 1


def _check_dims(v, w):
    v, w = tuple(int(a) for a in v), tuple(int(a) for a in w)
    if len(v) != len(w):
        raise ValidationError("v and w have different lengths: %d vs %d" % (len(v), len(w)))
    if not v:
        raise ValidationError("v and w must be non-empty")
    if any(a < 0 for a in v + w):
        raise ValidationError("dimension vectors must be non-negative")
    return v, w


@lru_cache(maxsize=None)
def _profiles(n, r):
    """Partitions of n with their residue profile for a corner of content 1."""
    out = []
    for parts in partitions_of(n):
        prof = [0] * r
        for x, y in boxes(parts):
            prof[(x - y) % r] += 1
        out.append((parts, tuple(prof)))
    return out


def enumerate_fixed_points(v, w):
    """Every (v, w)-tuple of partitions, in a deterministic order."""
    v, w = _check_dims(v, w)
    r = len(v)
    slots = [(i, j) for i in range(1, r + 1) for j in range(1, w[i - 1] + 1)]
    total = sum(v)
    out = []

    def rec(k, remaining, acc):
        if k == len(slots):
            if not any(remaining):
                out.append(FixedPoint(tuple(acc)))
            return
        i, j = slots[k]
        left = sum(remaining)
        for n in range(left, -1, -1):
            for parts, prof in _profiles(n, r):
                new = list(remaining)
                ok = True
                for m in range(r):
                    # a corner at vertex i shifts residues by i - 1
                    res = (m + i - 1) % r
                    new[res] -= prof[m]
                    if new[res] < 0:
                        ok = False
                        break
                if ok:
                    rec(k + 1, new, acc + [LabeledPartition(parts, i, j)])

    if total == 0:
        return [FixedPoint(tuple(LabeledPartition((), i, j) for i, j in slots))]
    rec(0, list(v), [])
    return out


# -- trees ---------------------------------------------------------------------

def skeleton(parts):
    """Undirected edges between adjacent boxes, as sorted box pairs."""
    edges = []
    for x, y in boxes(parts):
        if contains(parts, (x + 1, y)):
            edges.append(((x, y), (x + 1, y)))
        if contains(parts, (x, y + 1)):
            edges.append(((x, y), (x, y + 1)))
    return edges


def l_subgraphs(parts):
    """Each L-shape as ``(e1, e2)`` with e1 = {(x,y),(x+1,y)}, e2 = {(x+1,y),(x+1,y+1)}."""
    out = []
    for x in range(1, len(parts)):
        for y in range(1, parts[x]):
            out.append((((x, y), (x + 1, y)), ((x + 1, y), (x + 1, y + 1))))
    return out


@dataclass(frozen=True)
class Tree:
    """A spanning tree of a partition, oriented away from the corner box.

    ``edges`` is a frozenset of ``(tail, head)`` box pairs.
    """

    parts: tuple
    edges: frozenset

    def children(self):
        ch = {}
        for t, h in self.edges:
            ch.setdefault(t, []).append(h)
        for v in ch.values():
            v.sort()
        return ch

    def sorted_edges(self):
        return sorted(self.edges)

    def __str__(self):
        return ", ".join("%s->%s" % e for e in self.sorted_edges())


def orient_tree(parts, undirected):
    """Orient an undirected edge list away from (1,1); None if not a spanning tree."""
    bxs = boxes(parts)
    if not bxs:
        return Tree(tuple(parts), frozenset())
    if len(undirected) != len(bxs) - 1:
        return None
    adj = {b: [] for b in bxs}
    for a, b in undirected:
        adj[a].append(b)
        adj[b].append(a)
    seen = {(1, 1)}
    oriented = []
    queue = deque([(1, 1)])
    while queue:
        a = queue.popleft()
        for b in sorted(adj[a]):
            if b not in seen:
                seen.add(b)
                oriented.append((a, b))
                queue.append(b)
    if len(seen) != len(bxs):
        return None
    return Tree(tuple(parts), frozenset(oriented))


def admissible_trees(parts):
    """All 2^m admissible trees; bit k of the counter picks e2 of L-shape k."""
    parts = tuple(parts)
    ls = l_subgraphs(parts)
    skel = skeleton(parts)
    out = []
    for mask in range(2 ** len(ls)):
        deleted = {ls[k][(mask >> k) & 1] for k in range(len(ls))}
        t = orient_tree(parts, [e for e in skel if e not in deleted])
        if t is None:
            raise AssertionError("edge choice %d of %r is not a spanning tree" % (mask, parts))
        out.append(t)
    return out


def kappa(tree):
    """Down-directed vertical edges plus left-directed horizontal edges."""
    k = 0
    for (tx, ty), (hx, hy) in tree.edges:
        if tx == hx and hy < ty:
            k += 1
        elif ty == hy and hx < tx:
            k += 1
    return k


def subtree_boxes(tree, box):
    """Boxes reachable from ``box`` following edge orientation (``box`` included)."""
    if not contains(tree.parts, box):
        raise ValidationError("box %r is not in partition %r" % (box, tree.parts))
    ch = tree.children()
    out = set()
    stack = [box]
    while stack:
        b = stack.pop()
        out.add(b)
        stack.extend(ch.get(b, ()))
    return out


def tree_tuples(point):
    """Cartesian product of admissible trees over the parts of a fixed point."""
    return product(*(admissible_trees(lp.parts) for lp in point.parts))
