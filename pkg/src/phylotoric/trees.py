"""Unrooted leaf-labelled trees, Newick I/O and the catalog of small shapes.

Vertex and edge ids are canonical functions of the labelled tree, so two
parses of equivalent Newick strings give equal ``PhyloTree`` objects:

* leaves are ``1..n``; internal vertices are numbered ``n+1, n+2, ...`` in
  preorder of the canonical Newick traversal;
* edge ``i`` (``1 <= i <= n``) is the pendant edge of leaf ``i``; internal
  edges follow, sorted by the leaf set of their side not containing leaf 1.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence


class NewickError(ValueError):
    """Malformed Newick input; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnbalancedParenthesesError(NewickError):
    pass


class DuplicateLeafError(NewickError):
    pass


class LeafLabelError(NewickError):
    pass


class BranchLengthError(NewickError):
    pass


class DegenerateTreeError(NewickError):
    pass


@dataclass(frozen=True)
class EdgeSplit:
    edge_id: int
    far_leaves: frozenset[int]


@dataclass(frozen=True)
class PhyloTree:
    """Unrooted tree with leaves ``1..n_leaves`` and canonical ids."""

    n_leaves: int
    edges: tuple[tuple[int, int], ...]  # edge id k is edges[k - 1]

    @classmethod
    def from_edges(cls, n_leaves: int, edges: Iterable[tuple[int, int]]) -> "PhyloTree":
        """Build from any vertex labelling where leaves are ``1..n_leaves``."""
        edges = [tuple(e) for e in edges]
        adj: dict[int, list[int]] = {}
        for u, v in edges:
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        _validate(n_leaves, adj, len(edges))
        return cls._canonical(n_leaves, adj)

    @classmethod
    def _canonical(cls, n: int, adj: dict[int, list[int]]) -> "PhyloTree":
        root, second = _center(adj, n)
        minleaf = _min_leaves(adj, n)
        if second is not None and minleaf[(root, second)] < minleaf[(second, root)]:
            root, second = second, root
        # preorder from the center, children by smallest leaf below them
        ids: dict[int, int] = {v: v for v in range(1, n + 1)}
        nxt = n + 1
        seen = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            if v > n:
                ids[v] = nxt
                nxt += 1
            kids = [w for w in adj[v] if w not in seen]
            seen.update(kids)
            stack.extend(sorted(kids, key=lambda w: minleaf[(v, w)], reverse=True))
        edges = set()
        for u, ws in adj.items():
            for w in ws:
                a, b = ids[u], ids[w]
                edges.add((min(a, b), max(a, b)))
        pend = {}
        internal = []
        for a, b in edges:
            if a <= n:
                pend[a] = (a, b)
            else:
                internal.append((a, b))
        tmp = cls(n, tuple(pend[i] for i in range(1, n + 1)) + tuple(internal))
        key = {}
        for a, b in internal:
            side = tmp._side(a, b)
            if 1 in side:
                side = frozenset(range(1, n + 1)) - side
            key[(a, b)] = tuple(sorted(side))
        internal.sort(key=lambda e: (key[e], e))
        return cls(n, tuple(pend[i] for i in range(1, n + 1)) + tuple(internal))

    # structure ------------------------------------------------------------

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> list[int]:
        return list(range(1, self.n_edges + 2))

    @property
    def internal_vertices(self) -> list[int]:
        return list(range(self.n_leaves + 1, self.n_edges + 2))

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def degree(self, v: int) -> int:
        return sum(v in e for e in self.edges)

    def edge_id(self, u: int, v: int) -> int:
        e = (min(u, v), max(u, v))
        return self.edges.index(e) + 1

    def _side(self, a: int, b: int) -> frozenset[int]:
        """Leaves reachable from ``b`` without crossing edge ``(a, b)``."""
        adj = self.adjacency()
        seen = {a, b}
        stack = [b]
        leaves = set()
        while stack:
            v = stack.pop()
            if v <= self.n_leaves:
                leaves.add(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(leaves)

    def splits(self) -> set[frozenset[frozenset[int]]]:
        """Root-free description: each edge as the unordered pair of leaf sides."""
        out = set()
        for a, b in self.edges:
            s = self._side(a, b)
            out.add(frozenset((s, frozenset(range(1, self.n_leaves + 1)) - s)))
        return out

    @property
    def default_root(self) -> int:
        """Lowest-id internal vertex."""
        return self.n_leaves + 1

    def relabel(self, perm: dict[int, int] | Sequence[int]) -> "PhyloTree":
        """Tree with leaf ``i`` renamed ``perm[i]`` (sequence: ``perm[i - 1]``)."""
        if not isinstance(perm, dict):
            perm = {i + 1: p for i, p in enumerate(perm)}
        n = self.n_leaves
        if sorted(perm) != list(range(1, n + 1)) or sorted(perm.values()) != list(range(1, n + 1)):
            raise ValueError("not a permutation of the leaves")
        mp = lambda v: perm[v] if v <= n else v
        return PhyloTree.from_edges(n, [(mp(u), mp(v)) for u, v in self.edges])

    def __str__(self) -> str:
        return to_newick(self)


def _validate(n: int, adj: dict[int, list[int]], nedges: int):
    if n < 3:
        raise ValueError("trees need at least 3 leaves")
    for i in range(1, n + 1):
        if i not in adj or len(adj[i]) != 1:
            raise ValueError(f"leaf {i} must have degree 1")
    for v, ws in adj.items():
        if v > n and len(ws) < 3:
            raise ValueError(f"internal vertex {v} has degree {len(ws)} < 3")
        if v < 1:
            raise ValueError(f"invalid vertex id {v}")
    if nedges != len(adj) - 1:
        raise ValueError("graph is not a tree (edge count)")
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(adj):
        raise ValueError("graph is not connected")


def _center(adj: dict[int, list[int]], n: int) -> tuple[int, int | None]:
    """Center vertex, or the two ends of the central edge."""
    deg = {v: len(ws) for v, ws in adj.items()}
    layer = [v for v, d in deg.items() if d <= 1]
    remaining = len(adj)
    removed = set()
    while remaining > 2:
        nxt = []
        for v in layer:
            removed.add(v)
            remaining -= 1
            for w in adj[v]:
                if w not in removed:
                    deg[w] -= 1
                    if deg[w] == 1:
                        nxt.append(w)
        layer = nxt
    rest = sorted(v for v in adj if v not in removed)
    if len(rest) == 1:
        return rest[0], None
    return rest[0], rest[1]


def _min_leaves(adj, n):
    """Smallest leaf below ``w`` when entering from ``v``, for all directed edges."""
    memo: dict[tuple[int, int], int] = {}

    for v, ws in adj.items():
        for w in ws:
            best = w if w <= n else None
            seen = {v, w}
            stack = [w]
            while stack:
                x = stack.pop()
                if x <= n and (best is None or x < best):
                    best = x
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            memo[(v, w)] = best
    return memo


# ---------------------------------------------------------------------------
# Newick


def to_newick(t: PhyloTree) -> str:
    """Canonical Newick: rooted at the tree center, children by smallest leaf."""
    adj = t.adjacency()
    n = t.n_leaves
    root, second = _center(adj, n)
    minleaf = _min_leaves(adj, n)

    def render(v, parent):
        if v <= n:
            return str(v)
        kids = [w for w in adj[v] if w != parent]
        parts = sorted(((minleaf[(v, w)], render(w, v)) for w in kids))
        return "(" + ",".join(p for _, p in parts) + ")"

    if second is None:
        return render(root, None) + ";"
    a = render(root, second)
    b = render(second, root)
    ma, mb = minleaf[(second, root)], minleaf[(root, second)]
    parts = sorted([(ma, a), (mb, b)])
    return "(" + ",".join(p for _, p in parts) + ");"


def parse_newick(s: str) -> PhyloTree:
    """Parse topology-only Newick with positive integer leaf labels.

    Vertices of degree 2 (from rooted input) are suppressed.
    """
    pos = 0
    adj: dict[int, list[int]] = {}
    labels: dict[int, int] = {}
    counter = [0]
    n_text = len(s)

    def new_internal():
        counter[0] += 1
        return -counter[0]

    def skip_ws():
        nonlocal pos
        while pos < n_text and s[pos].isspace():
            pos += 1

    def link(u, v):
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)

    def subtree():
        nonlocal pos
        skip_ws()
        if pos >= n_text:
            raise UnbalancedParenthesesError("unexpected end of input", pos)
        c = s[pos]
        if c == "(":
            pos += 1
            v = new_internal()
            adj.setdefault(v, [])
            while True:
                child = subtree()
                link(v, child)
                skip_ws()
                if pos >= n_text:
                    raise UnbalancedParenthesesError("missing ')'", pos)
                if s[pos] == ",":
                    pos += 1
                    continue
                if s[pos] == ")":
                    pos += 1
                    break
                if s[pos] == ":":
                    raise BranchLengthError("branch lengths are not supported", pos)
                if s[pos] == ";":
                    raise UnbalancedParenthesesError("missing ')' before ';'", pos)
                raise NewickError(f"unexpected character {s[pos]!r}", pos)
            skip_ws()
            if pos < n_text and s[pos] == ":":
                raise BranchLengthError("branch lengths are not supported", pos)
            if pos < n_text and (s[pos].isalnum() or s[pos] == "_"):
                raise NewickError("internal node labels are not supported", pos)
            return v
        if c.isdigit():
            start = pos
            while pos < n_text and s[pos].isdigit():
                pos += 1
            if pos < n_text and (s[pos].isalpha() or s[pos] in "._"):
                raise LeafLabelError("leaf labels must be positive integers", start)
            label = int(s[start:pos])
            if label < 1:
                raise LeafLabelError("leaf labels must be positive integers", start)
            if label in labels:
                raise DuplicateLeafError(f"duplicate leaf label {label}", start)
            labels[label] = start
            adj.setdefault(label, [])
            skip_ws()
            if pos < n_text and s[pos] == ":":
                raise BranchLengthError("branch lengths are not supported", pos)
            return label
        if c == ")":
            raise UnbalancedParenthesesError("unexpected ')'", pos)
        if c in ",;":
            raise NewickError("empty subtree", pos)
        raise LeafLabelError(f"unexpected character {c!r}", pos)

    root = subtree()
    skip_ws()
    if pos >= n_text:
        raise NewickError("missing terminating ';'", pos)
    if s[pos] == ")":
        raise UnbalancedParenthesesError("unexpected ')'", pos)
    if s[pos] != ";":
        raise NewickError(f"unexpected character {s[pos]!r}", pos)
    end = pos
    pos += 1
    skip_ws()
    if pos != n_text:
        raise NewickError("trailing characters after ';'", pos)

    n = len(labels)
    if sorted(labels) != list(range(1, n + 1)):
        missing = sorted(set(range(1, max(labels, default=0) + 1)) - set(labels))
        bad = max(labels, default=0)
        raise LeafLabelError(f"leaf labels must be 1..{n}; missing {missing}", labels.get(bad, 0))
    if n < 3:
        raise DegenerateTreeError("trees need at least 3 leaves", end)
    # suppress internal vertices of degree <= 2
    changed = True
    while changed:
        changed = False
        for v in list(adj):
            if v < 0 and len(adj[v]) <= 2:
                ws = adj.pop(v)
                for w in ws:
                    adj[w].remove(v)
                if len(ws) == 2:
                    link(ws[0], ws[1])
                changed = True
    # relabel internal vertices to n+1.. (any order; canonicalised later)
    mapping = {}
    k = n
    for v in sorted(adj):
        if v < 0:
            k += 1
            mapping[v] = k
    edges = set()
    for u, ws in adj.items():
        for w in ws:
            a, b = mapping.get(u, u), mapping.get(w, w)
            edges.add((min(a, b), max(a, b)))
    try:
        return PhyloTree.from_edges(n, sorted(edges))
    except ValueError as exc:
        raise DegenerateTreeError(str(exc), end) from None


def read_newick_file(path) -> list[PhyloTree]:
    """One tree per non-empty line."""
    with open(path, encoding="utf-8") as fh:
        return [parse_newick(line.strip()) for line in fh if line.strip()]


# ---------------------------------------------------------------------------
# edge splits and isomorphism


def edge_splits(t: PhyloTree, root: int | None = None) -> list[EdgeSplit]:
    """For each edge, the leaves whose path to ``root`` crosses it."""
    if root is None:
        root = t.default_root
    if root not in t.vertices:
        raise ValueError(f"unknown root vertex {root}")
    adj = t.adjacency()
    parent = {root: None}
    order = [root]
    for v in order:
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                order.append(w)
    below: dict[int, set[int]] = {v: ({v} if v <= t.n_leaves else set()) for v in t.vertices}
    for v in reversed(order):
        p = parent[v]
        if p is not None:
            below[p] |= below[v]
    out = []
    for k, (a, b) in enumerate(t.edges, start=1):
        child = b if parent.get(b) == a else a
        out.append(EdgeSplit(k, frozenset(below[child])))
    return out


def shape_key(t: PhyloTree) -> str:
    """Lexicographically smallest canonical Newick over all leaf relabelings."""
    n = t.n_leaves
    return min(to_newick(t.relabel(p)) for p in itertools.permutations(range(1, n + 1)))


def is_isomorphic(a: PhyloTree, b: PhyloTree) -> bool:
    """Equal up to relabelling leaves and internal vertices."""
    if a.n_leaves != b.n_leaves or a.n_edges != b.n_edges:
        return False
    return shape_key(a) == shape_key(b)


def automorphisms(t: PhyloTree) -> list[tuple[int, ...]]:
    """Leaf permutations ``p`` (``p[i-1]`` is the image of leaf ``i``) fixing the tree."""
    n = t.n_leaves
    target = t.splits()
    out = []
    for p in itertools.permutations(range(1, n + 1)):
        mapped = {frozenset(frozenset(p[i - 1] for i in side) for side in sp) for sp in target}
        if mapped == target:
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class TreeCatalogEntry:
    tree_id: int
    shape: PhyloTree
    newick: str


def _grow(t: PhyloTree) -> list[PhyloTree]:
    """All trees obtained from ``t`` by attaching leaf ``n+1``."""
    n = t.n_leaves
    out = []
    shift = lambda v: v + 1 if v > n else v
    base = [(shift(u), shift(v)) for u, v in t.edges]
    new_leaf = n + 1
    top = t.n_edges + 2 + 1  # fresh internal id after the shift
    for v in t.internal_vertices:
        out.append(PhyloTree.from_edges(n + 1, base + [(shift(v), new_leaf)]))
    for k, (u, v) in enumerate(base):
        es = base[:k] + base[k + 1:] + [(u, top), (top, v), (top, new_leaf)]
        out.append(PhyloTree.from_edges(n + 1, es))
    return out


def catalog(max_leaves: int) -> list[TreeCatalogEntry]:
    """Tree shapes with 3..max_leaves leaves, up to leaf relabeling.

    Each shape is represented by its labelling with the smallest canonical
    Newick; ids are 1, 2, ... in (leaves, edges, Newick) order.
    """
    if not isinstance(max_leaves, int) or isinstance(max_leaves, bool) or not 3 <= max_leaves <= 5:
        raise ValueError("max_leaves must be an integer in 3..5")
    return list(_catalog(max_leaves))


@functools.lru_cache(maxsize=None)
def _catalog(max_leaves: int) -> tuple[TreeCatalogEntry, ...]:
    layer = [PhyloTree.from_edges(3, [(1, 4), (2, 4), (3, 4)])]
    shapes: dict[str, PhyloTree] = {}
    for n in range(3, max_leaves + 1):
        if n > 3:
            layer = [g for t in layer for g in _grow(t)]
            uniq = {}
            for g in layer:
                uniq.setdefault(to_newick(g), g)
            layer = list(uniq.values())
        for t in layer:
            key = shape_key(t)
            shapes.setdefault(key, parse_newick(key))
    ordered = sorted(shapes.items(), key=lambda kv: (kv[1].n_leaves, kv[1].n_edges, kv[0]))
    return tuple(TreeCatalogEntry(i, t, key) for i, (key, t) in enumerate(ordered, start=1))


def catalog_tree(tree_id: int) -> TreeCatalogEntry:
    for e in catalog(5):
        if e.tree_id == tree_id:
            return e
    raise KeyError(f"no catalog tree with id {tree_id}")
