"""Simple undirected graphs, benchmark families, edge-list ingestion and
min-degree pruning."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence


class GraphFormatError(ValueError):
    """Raised for malformed edge-list documents or invalid edge sets."""


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    ``parts`` optionally records a bipartition ``(A, B)`` for graphs built as
    complete bipartite graphs; it is used by the bipartite bound.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    adj: tuple[frozenset[int], ...] = field(repr=False, compare=False)
    parts: tuple[tuple[int, ...], tuple[int, ...]] | None = field(default=None, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], parts=None) -> "Graph":
        if n < 0:
            raise GraphFormatError(f"negative vertex count {n}")
        adj: list[set[int]] = [set() for _ in range(n)]
        norm = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise GraphFormatError(f"loop edge at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u}, {v}) out of range for n={n}")
            if v in adj[u]:
                raise GraphFormatError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
            norm.append((min(u, v), max(u, v)))
        norm.sort()
        if parts is not None:
            parts = (tuple(parts[0]), tuple(parts[1]))
        return cls(n, tuple(norm), tuple(frozenset(s) for s in adj), parts)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.adj)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def average_degree(self) -> Fraction:
        if self.n == 0:
            return Fraction(0)
        return Fraction(2 * self.m, self.n)

    @property
    def min_degree(self) -> int:
        return min(self.degrees, default=0)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adj[v]

    def is_regular(self) -> bool:
        return len(set(self.degrees)) <= 1

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp, stack = [s], [s]
            while stack:
                u = stack.pop()
                for w in self.adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def is_clique_union(self) -> bool:
        """True iff every connected component is a complete graph."""
        for comp in self.components():
            k = len(comp)
            if any(self.degree(v) != k - 1 for v in comp):
                return False
        return True

    def is_equal_clique_union(self) -> bool:
        """True iff G is a disjoint union of cliques all of order d+1.

        d is the exact average degree, so it must be an integer here.
        """
        if self.n == 0 or not self.is_clique_union():
            return False
        d = self.average_degree
        if d.denominator != 1:
            return False
        return all(len(c) == d + 1 for c in self.components())

    def bipartition(self) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
        """Recorded parts if present, otherwise a 2-colouring (lowest id of
        each component on the first side), or None if G is not bipartite."""
        if self.parts is not None:
            return self.parts
        colour = [-1] * self.n
        for s in range(self.n):
            if colour[s] >= 0:
                continue
            colour[s] = 0
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self.adj[u]:
                    if colour[w] < 0:
                        colour[w] = 1 - colour[u]
                        stack.append(w)
                    elif colour[w] == colour[u]:
                        return None
        a = tuple(v for v in range(self.n) if colour[v] == 0)
        b = tuple(v for v in range(self.n) if colour[v] == 1)
        return a, b

    def delete_vertex(self, v: int) -> tuple["Graph", list[int]]:
        """Return G - v relabelled to 0..n-2 and the map new id -> old id."""
        keep = [u for u in range(self.n) if u != v]
        index = {u: i for i, u in enumerate(keep)}
        edges = [(index[a], index[b]) for a, b in self.edges if v not in (a, b)]
        return Graph.from_edges(len(keep), edges), keep

    def edge_list_text(self) -> str:
        lines = [f"n={self.n}"] + [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "average_degree": str(self.average_degree),
            "min_degree": self.min_degree,
            "max_degree": self.max_degree,
        }


_HEADER = re.compile(r"^n\s*=\s*(\d+)$")


def load_graph(text: str) -> Graph:
    """Parse an edge-list document.

    One edge ``u v`` per line; blank lines and ``#`` comments are ignored.
    An optional header ``n=N`` fixes the vertex count, otherwise it is
    ``max id + 1``.
    """
    n_header = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        hm = _HEADER.match(line)
        if hm:
            if n_header is not None or edges:
                raise GraphFormatError(f"line {lineno}: header must come first and only once")
            n_header = int(hm.group(1))
            continue
        tok = line.split()
        if len(tok) != 2 or not all(t.isdigit() for t in tok):
            raise GraphFormatError(f"line {lineno}: malformed edge {raw!r}")
        u, v = int(tok[0]), int(tok[1])
        if u == v:
            raise GraphFormatError(f"line {lineno}: loop edge at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"line {lineno}: duplicate edge {u} {v}")
        seen.add(key)
        edges.append((u, v))
    n = max((max(e) for e in edges), default=-1) + 1
    if n_header is not None:
        if n_header < n:
            raise GraphFormatError(f"header n={n_header} smaller than max id + 1 = {n}")
        n = n_header
    return Graph.from_edges(n, edges)


# -- families ---------------------------------------------------------------


def make_clique_union(k: int, s: int) -> Graph:
    """k disjoint copies of K_s."""
    if k < 1 or s < 1:
        raise ValueError("clique_union needs k >= 1 and s >= 1")
    edges = []
    for c in range(k):
        base = c * s
        edges.extend((base + u, base + v) for u, v in combinations(range(s), 2))
    return Graph.from_edges(k * s, edges)


def make_complete_bipartite(a: int, b: int) -> Graph:
    if a < 1 or b < 1:
        raise ValueError("complete_bipartite needs a >= 1 and b >= 1")
    left = tuple(range(a))
    right = tuple(range(a, a + b))
    return Graph.from_edges(a + b, [(u, v) for u in left for v in right], parts=(left, right))


def make_cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def make_path(n: int) -> Graph:
    """Path graph on n vertices (n-1 edges)."""
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def make_complete(n: int) -> Graph:
    return make_clique_union(1, n)


def make_split(n: int, a: int) -> Graph:
    """Split graph: the first ``a`` vertices are adjacent to everything,
    the remaining ``n - a`` form an independent set."""
    if not 0 <= a <= n:
        raise ValueError("split graph needs 0 <= a <= n")
    edges = [(u, v) for u in range(a) for v in range(u + 1, n)]
    return Graph.from_edges(n, edges)


@dataclass(frozen=True)
class GraphFamilySpec:
    family: str
    params: tuple[tuple[str, int], ...]

    def build(self) -> Graph:
        p = dict(self.params)
        builders = {
            "clique_union": (make_clique_union, ("k", "s")),
            "complete_bipartite": (make_complete_bipartite, ("a", "b")),
            "cycle": (make_cycle, ("n",)),
            "path": (make_path, ("n",)),
            "complete": (make_complete, ("n",)),
            "split": (make_split, ("n", "a")),
        }
        if self.family not in builders:
            raise ValueError(f"unknown graph family {self.family!r}")
        fn, names = builders[self.family]
        missing = [k for k in names if k not in p]
        extra = sorted(set(p) - set(names))
        if missing or extra:
            raise ValueError(f"family {self.family} takes parameters {','.join(names)}")
        if any(p[k] < 0 for k in names):
            raise ValueError("family parameters must be positive")
        return fn(*(p[k] for k in names))


def parse_params(body: str) -> dict[str, int]:
    params: dict[str, int] = {}
    if not body:
        return params
    for item in body.split(","):
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or not key or not re.fullmatch(r"\d+", val.strip()):
            raise ValueError(f"bad parameter {item!r}")
        params[key] = int(val)
    return params


def parse_family(text: str) -> GraphFamilySpec:
    """Parse ``"clique_union:k=3,s=4"`` style family strings."""
    family, _, body = text.partition(":")
    return GraphFamilySpec(family.strip(), tuple(sorted(parse_params(body).items())))


# -- min-degree pruning -----------------------------------------------------


class PruneStep(NamedTuple):
    vertex: int  # id in the original graph
    degree: int
    n_before: int
    d_before: Fraction
    d_after: Fraction


def min_degree_prune(g: Graph) -> tuple[Graph, list[PruneStep], list[int]]:
    """Delete vertices of degree < d/4 until none remain.

    The average degree is recomputed after every deletion. Among the
    eligible vertices the one of lowest degree goes first, ties broken by
    original id. Returns ``(pruned graph, trace, kept original ids)``; the
    pruned graph is relabelled so that vertex ``i`` is ``kept[i]``.
    """
    adj = {v: set(g.adj[v]) for v in range(g.n)}
    twice_m = 2 * g.m
    trace: list[PruneStep] = []
    while adj:
        n = len(adj)
        d = Fraction(twice_m, n)
        # deg < d/4  <=>  4*deg*n < twice_m
        cands = [v for v, nb in adj.items() if 4 * len(nb) * n < twice_m]
        if not cands:
            break
        v = min(cands, key=lambda u: (len(adj[u]), u))
        deg = len(adj[v])
        for w in adj.pop(v):
            adj[w].discard(v)
        twice_m -= 2 * deg
        d_after = Fraction(twice_m, n - 1) if n > 1 else Fraction(0)
        trace.append(PruneStep(v, deg, n, d, d_after))
    kept = sorted(adj)
    index = {u: i for i, u in enumerate(kept)}
    edges = [(index[u], index[w]) for u in kept for w in adj[u] if u < w]
    return Graph.from_edges(len(kept), edges), trace, kept
