"""Exhaustive small-graph searches: one graph per isomorphism class with a
given (n, m), minimisers of tree and forest counts, and the forest
comparisons between clique unions and split / complete bipartite graphs."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

from .counting import count_forest, count_injective, main_bound, matching_forest
from .graphs import Graph, make_clique_union, make_complete_bipartite, make_split
from .trees import RootedTree

MAX_N = 8


# -- canonical forms --------------------------------------------------------


def _refine(cells: list[list[int]], adj: Sequence[int]) -> list[list[int]]:
    """Equitable refinement of an ordered partition.

    Each cell is split by the vector of neighbour counts into every cell;
    subcells are ordered by that vector so the result is label-invariant.
    """
    while True:
        where = {}
        for ci, cell in enumerate(cells):
            for v in cell:
                where[v] = ci
        out: list[list[int]] = []
        changed = False
        for cell in cells:
            if len(cell) == 1:
                out.append(cell)
                continue
            sig = {}
            for v in cell:
                counts = [0] * len(cells)
                nb = adj[v]
                while nb:
                    low = nb & -nb
                    counts[where[low.bit_length() - 1]] += 1
                    nb ^= low
                sig[v] = tuple(counts)
            keys = sorted(set(sig.values()))
            if len(keys) > 1:
                changed = True
                for key in keys:
                    out.append(sorted(v for v in cell if sig[v] == key))
            else:
                out.append(cell)
        cells = out
        if not changed:
            return cells


def _code(order: Sequence[int], adj: Sequence[int]) -> int:
    n = len(order)
    code = 0
    for a in range(n):
        row = adj[order[a]]
        for b in range(a + 1, n):
            code = (code << 1) | ((row >> order[b]) & 1)
    return code


def canonical_code(n: int, edges) -> int:
    """Minimal upper-triangle code over the labellings reachable by
    individualisation-refinement (an isomorphism invariant that determines
    the graph)."""
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    if n <= 1:
        return 0
    best = None

    def search(cells):
        nonlocal best
        cells = _refine(cells, adj)
        for ci, cell in enumerate(cells):
            if len(cell) > 1:
                break
        else:
            code = _code([c[0] for c in cells], adj)
            if best is None or code < best:
                best = code
            return
        for v in cell:
            rest = [w for w in cell if w != v]
            search(cells[:ci] + [[v], rest] + cells[ci + 1:])

    search([list(range(n))])
    return best


def code_to_edges(n: int, code: int) -> tuple[tuple[int, int], ...]:
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    total = len(pairs)
    return tuple(pairs[k] for k in range(total) if (code >> (total - 1 - k)) & 1)


def canonical_graph(g: Graph) -> tuple[int, tuple[tuple[int, int], ...]]:
    code = canonical_code(g.n, g.edges)
    return code, code_to_edges(g.n, code)


# -- enumeration ------------------------------------------------------------


@lru_cache(maxsize=None)
def _level(n: int, m: int) -> tuple[int, ...]:
    """Sorted canonical codes of all (n, m) graphs, for m <= C(n,2)/2."""
    if m == 0:
        return (canonical_code(n, ()),)
    found = set()
    for code in _level(n, m - 1):
        edges = code_to_edges(n, code)
        present = set(edges)
        for e in combinations(range(n), 2):
            if e not in present:
                found.add(canonical_code(n, edges + (e,)))
    return tuple(sorted(found))


def enumerate_graphs(n: int, m: int) -> Iterator[Graph]:
    """One graph per isomorphism class with n vertices and m edges.

    Classes are grown edge by edge and deduplicated by canonical code;
    above half the possible edges the complements of the sparse side are
    used.
    """
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in 1..{MAX_N}")
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        return
    if 2 * m <= total:
        for code in _level(n, m):
            yield Graph.from_edges(n, code_to_edges(n, code))
        return
    everything = set(combinations(range(n), 2))
    for code in _level(n, total - m):
        comp = sorted(everything - set(code_to_edges(n, code)))
        yield Graph.from_edges(n, comp)


def class_count(n: int, m: int) -> int:
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        return 0
    return len(_level(n, min(m, total - m)))


# -- searches ---------------------------------------------------------------


def clique_union_for(n: int, m: int) -> Graph | None:
    """The disjoint union of equal cliques with n vertices and m edges."""
    if n == 0 or (2 * m) % n:
        return None
    s = 2 * m // n + 1
    if n % s:
        return None
    return make_clique_union(n // s, s)


@dataclass
class SearchResult:
    n: int
    m: int
    pattern: str
    classes: int
    minimum: int
    minimizers: list[tuple[tuple[int, int], ...]]
    clique_union_admissible: bool
    clique_union_is_minimizer: bool | None
    bound: Fraction | None = None
    counts: dict[int, int] = field(default_factory=dict, repr=False)  # canonical code -> count

    @property
    def margin(self) -> Fraction | None:
        return None if self.bound is None else self.minimum - self.bound

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "pattern": self.pattern,
            "classes": self.classes,
            "minimum": self.minimum,
            "minimizers": [[list(e) for e in edges] for edges in self.minimizers],
            "clique_union_admissible": self.clique_union_admissible,
            "clique_union_is_minimizer": self.clique_union_is_minimizer,
            "bound": None if self.bound is None else str(self.bound),
            "margin": None if self.margin is None else str(self.margin),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "m", "pattern", "count", "is_minimizer", "edges"])
        for code in sorted(self.counts):
            edges = code_to_edges(self.n, code)
            cnt = self.counts[code]
            w.writerow([self.n, self.m, self.pattern, cnt, int(cnt == self.minimum),
                        " ".join(f"{u}-{v}" for u, v in edges)])
        return buf.getvalue()


def _search(n: int, m: int, pattern: str, count, bound) -> SearchResult:
    counts: dict[int, int] = {}
    for g in enumerate_graphs(n, m):
        counts[canonical_code(n, g.edges)] = count(g)
    if not counts:
        raise ValueError(f"no graphs with n={n}, m={m}")
    low = min(counts.values())
    mins = [code for code in sorted(counts) if counts[code] == low]
    cu = clique_union_for(n, m)
    cu_min = None
    if cu is not None:
        cu_min = canonical_code(n, cu.edges) in mins
    return SearchResult(n, m, pattern, len(counts), low, [code_to_edges(n, c) for c in mins],
                        cu is not None, cu_min, bound, counts)


def find_min_mon(n: int, m: int, tree: RootedTree, pattern: str = "") -> SearchResult:
    """Exact minimum of |Mon(T, G)| over all (n, m) graphs."""
    bound = main_bound(_with_edges(n, m), tree.t)
    return _search(n, m, pattern or f"tree:{tree.canonical_code()}", lambda g: count_injective(tree, g), bound)


def _with_edges(n: int, m: int) -> Graph:
    """Any graph with n vertices and m edges (only n and m are used)."""
    return Graph.from_edges(n, list(combinations(range(n), 2))[:m])


def find_min_forest(n: int, m: int, k: int) -> SearchResult:
    """Exact minimum of |Mon(k disjoint edges, G)| over all (n, m) graphs."""
    forest = matching_forest(k)
    return _search(n, m, f"matching:k={k}", lambda g: count_forest(forest, g), None)


def split_size_for(n: int, m: int) -> int | None:
    """a with C(a,2) + a(n-a) = m, if the split construction fits (n, m)."""
    for a in range(n + 1):
        if a * (a - 1) // 2 + a * (n - a) == m:
            return a
    return None


@dataclass
class ForestComparison:
    k: int
    n: int
    d: int
    clique_union: dict
    alternatives: list[dict]

    @property
    def fewer_than_clique_union(self) -> list[str]:
        """Alternatives with exactly the clique union's edge count and
        strictly fewer copies."""
        base = self.clique_union["count"]
        return [alt["graph"] for alt in self.alternatives if alt["matched_m"] and alt["count"] < base]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "d": self.d,
            "clique_union": self.clique_union,
            "alternatives": self.alternatives,
            "fewer_than_clique_union": self.fewer_than_clique_union,
        }


def _entry(name: str, g: Graph, forest, m_target: int) -> dict:
    return {
        "graph": name,
        "m": g.m,
        "average_degree": str(g.average_degree),
        "matched_m": g.m == m_target,
        "count": count_forest(forest, g),
    }


def forest_counterexample_check(k: int, n: int, d: int) -> ForestComparison:
    """|Mon(F, .)| for F = k disjoint edges on the clique union
    (n/(d+1)) K_{d+1} against K_{ceil(d/2), n-ceil(d/2)} and, when the edge
    counts match exactly, the split graph."""
    if d < 1 or n % (d + 1):
        raise ValueError("need d >= 1 and (d+1) | n")
    half = (d + 1) // 2
    if half >= n:
        raise ValueError("bipartite side d/2 must be smaller than n")
    forest = matching_forest(k)
    cu = make_clique_union(n // (d + 1), d + 1)
    alts = [_entry(f"complete_bipartite:a={half},b={n - half}", make_complete_bipartite(half, n - half), forest, cu.m)]
    a = split_size_for(n, cu.m)
    if a is not None:
        alts.append(_entry(f"split:n={n},a={a}", make_split(n, a), forest, cu.m))
    return ForestComparison(k, n, d, _entry(f"clique_union:k={n // (d + 1)},s={d + 1}", cu, forest, cu.m), alts)


def search_forest_counterexamples(k: int = 2, n_max: int = 30) -> list[ForestComparison]:
    """Parameter sets (n, d) where a split or complete bipartite graph has
    exactly the clique union's edge count and strictly fewer copies of F."""
    found = []
    for n in range(2, n_max + 1):
        for d in range(1, n):
            if n % (d + 1):
                continue
            m = n * d // 2
            forest = matching_forest(k)
            cu_count = count_forest(forest, make_clique_union(n // (d + 1), d + 1))
            alts = []
            a = split_size_for(n, m)
            if a is not None and 0 < a < n:
                alts.append(_entry(f"split:n={n},a={a}", make_split(n, a), forest, m))
            for b in range(1, n // 2 + 1):
                if b * (n - b) == m:
                    alts.append(_entry(f"complete_bipartite:a={b},b={n - b}",
                                       make_complete_bipartite(b, n - b), forest, m))
            alts = [x for x in alts if x["count"] < cu_count]
            if alts:
                cu = make_clique_union(n // (d + 1), d + 1)
                found.append(ForestComparison(k, n, d, _entry(f"clique_union:k={n // (d + 1)},s={d + 1}", cu, forest, m), alts))
    return found


@dataclass
class SplitCheck:
    k: int
    n: int
    m: int
    a: int
    split_count: int
    minimum: int
    split_is_minimizer: bool
    minimizers: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def split_graph_min_check(k: int, n: int, m: int) -> SplitCheck:
    """Compare the split graph with (n, m) against the exhaustive minimum of
    |Mon(k disjoint edges, G)|."""
    a = split_size_for(n, m)
    if a is None:
        raise ValueError(f"no split graph has n={n} and m={m}")
    if n > MAX_N:
        raise ValueError(f"exhaustive check needs n <= {MAX_N}")
    split = make_split(n, a)
    split_count = count_forest(matching_forest(k), split)
    res = find_min_forest(n, m, k)
    return SplitCheck(k, n, m, a, split_count, res.minimum, split_count == res.minimum, len(res.minimizers))
