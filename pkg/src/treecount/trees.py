"""Rooted trees in BFS order from a leaf, and the small-tree catalog."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .graphs import parse_params


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class RootedTree:
    """A tree with vertices ``x_0..x_t`` in BFS order, ``x_0`` a leaf.

    ``labels[i]`` is the input label of ``x_i`` and ``parent[i]`` is the
    ancestor index a(i) (``parent[0] == -1``).
    """

    labels: tuple[int, ...]
    parent: tuple[int, ...]
    diameter: int
    children: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @property
    def t(self) -> int:
        return len(self.labels) - 1

    @property
    def order(self) -> int:
        return len(self.labels)

    def a(self, i: int) -> int:
        if i < 1:
            raise IndexError("a(i) is defined for i >= 1")
        return self.parent[i]

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges in BFS index space, ``(a(i), i)`` for i = 1..t."""
        return tuple((self.parent[i], i) for i in range(1, len(self.parent)))

    @property
    def input_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((self.labels[p], self.labels[c]) for p, c in self.edges)

    def depth(self, i: int) -> int:
        k = 0
        while i > 0:
            i = self.parent[i]
            k += 1
        return k

    def root_path(self, i: int) -> list[int]:
        """Indices of the path x_0 -> x_i."""
        path = [i]
        while i > 0:
            i = self.parent[i]
            path.append(i)
        return path[::-1]

    def prefix_degree(self, j: int, k: int) -> int:
        """Degree of x_j inside the subtree T^k (requires j <= k)."""
        deg = 1 if j > 0 else 0
        return deg + sum(1 for c in self.children[j] if c <= k)

    def is_leaf_in_prefix(self, j: int, k: int) -> bool:
        return self.prefix_degree(j, k) <= 1

    @property
    def parts(self) -> tuple[int, int]:
        """Bipartition sizes ``(t1, t2)``; t1 is the side containing x_0."""
        even = sum(1 for i in range(self.order) if self.depth(i) % 2 == 0)
        return even, self.order - even

    def canonical_code(self) -> str:
        return tree_code(self.order, self.edges)

    def describe(self) -> dict:
        return {
            "t": self.t,
            "labels": list(self.labels),
            "ancestors": list(self.parent[1:]),
            "diameter": self.diameter,
            "parts": list(self.parts),
        }


def _adjacency(vertices: Iterable[int], edges: Sequence[Sequence[int]]) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {v: [] for v in vertices}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    for nb in adj.values():
        nb.sort()
    return adj


def _bfs_dist(adj: dict[int, list[int]], s: int) -> dict[int, int]:
    dist = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def build_rooted_tree(edges: Sequence[Sequence[int]], vertices: Iterable[int] | None = None) -> RootedTree:
    """BFS-order a tree from its lowest-id leaf.

    ``vertices`` is only needed for the one-vertex tree (no edges); it
    defaults to ``{0}`` in that case.
    """
    edges = [(int(u), int(v)) for u, v in edges]
    verts = set(vertices) if vertices is not None else set()
    for u, v in edges:
        if u == v:
            raise TreeError(f"loop at {u}")
        verts.update((u, v))
    if not verts:
        verts = {0}
    if len({(min(e), max(e)) for e in edges}) != len(edges):
        raise TreeError("duplicate tree edge")
    if len(edges) != len(verts) - 1:
        raise TreeError(f"{len(verts)} vertices and {len(edges)} edges: not a tree")
    adj = _adjacency(verts, edges)
    if len(verts) == 1:
        (root,) = verts
        return RootedTree((root,), (-1,), 0, ((),))
    root = min(v for v in verts if len(adj[v]) == 1) if any(len(adj[v]) == 1 for v in verts) else None
    if root is None:
        raise TreeError("no leaf: input has a cycle")
    index = {root: 0}
    labels = [root]
    parent = [-1]
    q = deque([root])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if w not in index:
                index[w] = len(labels)
                labels.append(w)
                parent.append(index[u])
                q.append(w)
    if len(labels) != len(verts):
        raise TreeError("input is not connected")
    children: list[list[int]] = [[] for _ in labels]
    for i in range(1, len(labels)):
        children[parent[i]].append(i)
    far = max(_bfs_dist(adj, root).items(), key=lambda kv: (kv[1], -kv[0]))[0]
    diameter = max(_bfs_dist(adj, far).values())
    return RootedTree(tuple(labels), tuple(parent), diameter, tuple(tuple(c) for c in children))


# -- canonical codes --------------------------------------------------------


def _rooted_code(adj: dict[int, list[int]], root: int) -> str:
    # iterative post-order to stay clear of recursion limits
    parent = {root: None}
    order = [root]
    for u in order:
        for w in adj[u]:
            if w != parent[u]:
                parent[w] = u
                order.append(w)
    code: dict[int, str] = {}
    for u in reversed(order):
        kids = sorted(code[w] for w in adj[u] if w != parent[u])
        code[u] = "(" + "".join(kids) + ")"
    return code[root]


def tree_centers(adj: dict[int, list[int]]) -> list[int]:
    if len(adj) <= 2:
        return sorted(adj)
    deg = {v: len(nb) for v, nb in adj.items()}
    layer = [v for v, k in deg.items() if k <= 1]
    remaining = len(adj)
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for w in adj[v]:
                deg[w] -= 1
                if deg[w] == 1:
                    nxt.append(w)
        layer = nxt
    return sorted(layer)


def tree_code(order: int, edges: Sequence[Sequence[int]]) -> str:
    """AHU code of an unlabelled free tree, rooted at its centre(s)."""
    adj = _adjacency(range(order), edges)
    return min(_rooted_code(adj, c) for c in tree_centers(adj))


@lru_cache(maxsize=None)
def _catalog(order: int) -> tuple[tuple[str, tuple[tuple[int, int], ...]], ...]:
    if order == 1:
        return (("()", ()),)
    found: dict[str, tuple[tuple[int, int], ...]] = {}
    for _, edges in _catalog(order - 1):
        for v in range(order - 1):
            new = edges + ((v, order - 1),)
            found.setdefault(tree_code(order, new), new)
    return tuple(sorted(found.items()))


def enumerate_trees(vertex_count: int) -> list[RootedTree]:
    """One RootedTree per isomorphism class of trees on ``vertex_count``
    vertices, ordered by (diameter, canonical code)."""
    if not 1 <= vertex_count <= 10:
        raise ValueError("vertex_count must be in 1..10")
    trees = [build_rooted_tree(edges, range(vertex_count)) for _, edges in _catalog(vertex_count)]
    return sorted(trees, key=lambda T: (T.diameter, T.canonical_code()))


# -- named trees and spec strings -------------------------------------------


def path_tree(t: int) -> RootedTree:
    """Path with t edges."""
    return build_rooted_tree([(i, i + 1) for i in range(t)], range(t + 1))


def star_tree(t: int) -> RootedTree:
    """Star with t leaves; the centre has label 0."""
    return build_rooted_tree([(0, i) for i in range(1, t + 1)], range(t + 1))


def parse_tree_spec(text: str) -> RootedTree:
    """``path:t=3``, ``star:t=4``, ``catalog:v=5,i=2`` or ``edges:0-1,1-2``."""
    kind, _, body = text.partition(":")
    kind = kind.strip()
    if kind == "edges":
        pairs = []
        for item in filter(None, (s.strip() for s in body.split(","))):
            u, sep, v = item.partition("-")
            if not sep or not u.isdigit() or not v.isdigit():
                raise ValueError(f"bad tree edge {item!r}")
            pairs.append((int(u), int(v)))
        return build_rooted_tree(pairs)
    p = parse_params(body)
    if kind in ("path", "star"):
        if set(p) != {"t"}:
            raise ValueError(f"{kind} takes parameter t")
        return path_tree(p["t"]) if kind == "path" else star_tree(p["t"])
    if kind == "catalog":
        if set(p) != {"v", "i"}:
            raise ValueError("catalog takes parameters v,i")
        cat = enumerate_trees(p["v"])
        if p["i"] >= len(cat):
            raise ValueError(f"catalog for v={p['v']} has {len(cat)} trees")
        return cat[p["i"]]
    raise ValueError(f"unknown tree spec {text!r}")
