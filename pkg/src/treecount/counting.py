"""Exact homomorphism, embedding and walk counts, and the closed-form bounds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .graphs import Graph
from .trees import RootedTree, path_tree

DEFAULT_NODE_BUDGET = 50_000_000


class BudgetExceeded(RuntimeError):
    """A search or enumeration exceeded its configured budget."""


def falling_factorial(x, t: int):
    """x (x-1) ... (x-t+1); the empty product (t = 0) is 1."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    out = Fraction(1) if isinstance(x, Fraction) else 1
    for j in range(t):
        out *= x - j
    return out


def count_hom_tree(tree: RootedTree, g: Graph) -> int:
    """|Hom(T, G)| by leaf elimination in reverse BFS order."""
    n = g.n
    table: list[list[int] | None] = [None] * tree.order
    for i in reversed(range(tree.order)):
        row = [1] * n
        for c in tree.children[i]:
            sub = table[c]
            for v in range(n):
                row[v] *= sum(sub[w] for w in g.adj[v])
            table[c] = None
        table[i] = row
    return sum(table[0])


def count_injective(tree: RootedTree, g: Graph, max_nodes: int = DEFAULT_NODE_BUDGET) -> int:
    """|Mon(T, G)| by backtracking over the BFS order.

    The last tree vertex is counted rather than branched on. ``max_nodes``
    bounds the number of partial embeddings visited.
    """
    if tree.t == 0:
        return g.n
    return _count_sequence(g, list(tree.parent), max_nodes)


def _count_sequence(g: Graph, parent: Sequence[int], max_nodes: int) -> int:
    """Count injective placements of a sequence of pattern vertices where
    ``parent[i]`` is the index whose image x_i must neighbour, or -1 for a
    free (root) vertex."""
    k = len(parent)
    if k == 0:
        return 1
    img = [0] * k
    used: set[int] = set()
    nodes = 0
    adj = g.adj
    all_vertices = range(g.n)

    def rec(i: int) -> int:
        nonlocal nodes
        p = parent[i]
        cands = all_vertices if p < 0 else adj[img[p]]
        if i == k - 1:
            return sum(1 for w in cands if w not in used)
        nodes += 1
        if nodes > max_nodes:
            raise BudgetExceeded(f"embedding search exceeded {max_nodes} nodes")
        total = 0
        for w in cands:
            if w in used:
                continue
            img[i] = w
            used.add(w)
            total += rec(i + 1)
            used.discard(w)
        return total

    return rec(0)


def count_walks(g: Graph, t: int) -> int:
    """Walks with t edges; t = 0 counts vertices."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    w = [1] * g.n
    for _ in range(t):
        w = [sum(w[u] for u in g.adj[v]) for v in range(g.n)]
    return sum(w)


def count_nb_walks(g: Graph, t: int) -> int:
    """Non-backtracking walks with t edges, by a DP over oriented edges.

    Consecutive steps must use different undirected edges.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return g.n
    arcs = [(u, v) for u, v in g.edges] + [(v, u) for u, v in g.edges]
    count = {arc: 1 for arc in arcs}
    for _ in range(t - 1):
        into: dict[int, int] = {}
        for (u, v), c in count.items():
            into[v] = into.get(v, 0) + c
        # arcs v->w fed by every u->v except u == w
        count = {(v, w): into.get(v, 0) - count[(w, v)] for v, w in arcs}
    return sum(count.values())


@dataclass
class CountReport:
    mon_count: int
    hom_count: int
    bound: Fraction
    holds: bool
    equality: bool
    equality_classification: str

    def to_dict(self) -> dict:
        return {
            "mon_count": self.mon_count,
            "hom_count": self.hom_count,
            "bound": str(self.bound),
            "holds": self.holds,
            "equality": self.equality,
            "equality_classification": self.equality_classification,
        }


def main_bound(g: Graph, t: int) -> Fraction:
    """n (d)_t with d the exact average degree."""
    return g.n * falling_factorial(g.average_degree, t)


def classify_equality(tree: RootedTree, g: Graph) -> str:
    """Apply the equality dichotomy to a graph known to attain the bound."""
    if tree.diameter >= 3:
        return "clique_union_of_size_d_plus_1" if g.is_equal_clique_union() else "other"
    if tree.diameter == 2:
        return "d_regular" if g.is_regular() else "other"
    return "not_applicable"


def main_bound_check(tree: RootedTree, g: Graph, max_nodes: int = DEFAULT_NODE_BUDGET) -> CountReport:
    mon = count_injective(tree, g, max_nodes)
    hom = count_hom_tree(tree, g)
    bound = main_bound(g, tree.t)
    equality = Fraction(mon) == bound
    cls = classify_equality(tree, g) if equality else "not_applicable"
    return CountReport(mon, hom, bound, Fraction(mon) >= bound, equality, cls)


class AdversaryBound(NamedTuple):
    value: Fraction
    vacuous: bool


def adversary_lower_bound(g: Graph, t: int) -> AdversaryBound:
    """n (d - t(t-1))^t; vacuous when the base is not positive."""
    base = g.average_degree - t * (t - 1)
    return AdversaryBound(g.n * base**t, base <= 0)


def bipartite_bound_value(a: int, b: int, e: int, t1: int, t2: int) -> Fraction:
    """a (e/a)_{t2} (e/b)_{t1-1} + b (e/a)_{t1-1} (e/b)_{t2}."""
    ea, eb = Fraction(e, a), Fraction(e, b)
    ff = falling_factorial
    return a * ff(ea, t2) * ff(eb, t1 - 1) + b * ff(ea, t1 - 1) * ff(eb, t2)


class BipartiteBound(NamedTuple):
    a: int
    b: int
    e: int
    t1: int
    t2: int
    x0_side_first: Fraction  # t1 = part containing x_0
    swapped: Fraction | None  # roles of t1 and t2 exchanged; None when t2 = 0


def bipartite_bound(g: Graph, tree: RootedTree, parts=None) -> BipartiteBound:
    """Evaluate the bipartite bound for both assignments of the tree parts.

    Uses ``parts`` if given, else the recorded or computed bipartition of G.
    """
    parts = parts if parts is not None else g.bipartition()
    if parts is None:
        raise ValueError("graph is not bipartite")
    side = {v: 0 for v in parts[0]}
    side.update({v: 1 for v in parts[1]})
    if len(side) != g.n or any(side[u] == side[v] for u, v in g.edges):
        raise ValueError("parts do not form a bipartition of the graph")
    a, b = len(parts[0]), len(parts[1])
    if a == 0 or b == 0:
        raise ValueError("both parts must be nonempty")
    t1, t2 = tree.parts
    return BipartiteBound(
        a, b, g.m, t1, t2,
        bipartite_bound_value(a, b, g.m, t1, t2),
        bipartite_bound_value(a, b, g.m, t2, t1) if t2 >= 1 else None,
    )


def count_forest(forest: Sequence[RootedTree], g: Graph, max_nodes: int = DEFAULT_NODE_BUDGET) -> int:
    """|Mon(F, G)| for a disjoint union of trees: all components jointly
    injective."""
    parent: list[int] = []
    for tree in forest:
        offset = len(parent)
        parent.append(-1)
        parent.extend(offset + p for p in tree.parent[1:])
    return _count_sequence(g, parent, max_nodes)


def matching_forest(k: int) -> list[RootedTree]:
    """k disjoint edges."""
    return [path_tree(1) for _ in range(k)]
