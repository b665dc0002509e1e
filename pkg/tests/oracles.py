"""Independent brute-force reference implementations used by the tests.

Nothing here imports the counting kernels; everything is enumeration over
all maps, all walks or all permutations.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, permutations, product

from treecount.graphs import Graph


def hom_brute(tree_edges, order, g: Graph) -> int:
    return sum(
        1
        for f in product(range(g.n), repeat=order)
        if all(g.has_edge(f[a], f[b]) for a, b in tree_edges)
    )


def mon_brute(tree_edges, order, g: Graph) -> int:
    return sum(
        1
        for f in permutations(range(g.n), order)
        if all(g.has_edge(f[a], f[b]) for a, b in tree_edges)
    )


def walks_brute(g: Graph, t: int, non_backtracking: bool = False) -> int:
    total = 0

    def rec(path):
        nonlocal total
        if len(path) == t + 1:
            total += 1
            return
        for w in g.adj[path[-1]]:
            if non_backtracking and len(path) >= 2 and w == path[-2]:
                continue
            rec(path + [w])

    for v in range(g.n):
        rec([v])
    return total


def iso_classes_brute(n: int, m: int) -> int:
    """Isomorphism classes among all labelled (n, m) graphs, counted as
    orbits under the full symmetric group."""
    pairs = list(combinations(range(n), 2))
    perms = list(permutations(range(n)))
    covered = set()
    classes = 0
    for chosen in combinations(pairs, m):
        if frozenset(chosen) in covered:
            continue
        classes += 1
        for p in perms:
            covered.add(frozenset(tuple(sorted((p[u], p[v]))) for u, v in chosen))
    return classes


def is_isomorphic_brute(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.m != h.m:
        return False
    target = set(h.edges)
    for p in permutations(range(g.n)):
        if all(tuple(sorted((p[u], p[v]))) in target for u, v in g.edges):
            return True
    return False


def prufer_tree_classes(order: int) -> int:
    """Unlabelled trees on ``order`` vertices: decode every Prüfer sequence
    and count orbits under relabelling. A labelled tree outside every orbit
    seen so far starts a new class whose full orbit is then recorded."""
    if order <= 2:
        return 1
    perms = list(permutations(range(order)))
    covered = set()
    classes = 0
    for seq in product(range(order), repeat=order - 2):
        degree = [1] * order
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(v for v in range(order) if degree[v] == 1)
            edges.append((leaf, x))
            degree[leaf] -= 1
            degree[x] -= 1
        u, v = [w for w in range(order) if degree[w] == 1]
        edges.append((u, v))
        key = frozenset(tuple(sorted(e)) for e in edges)
        if key in covered:
            continue
        classes += 1
        for p in perms:
            covered.add(frozenset(tuple(sorted((p[a], p[b]))) for a, b in edges))
    assert len(covered) == order ** (order - 2)  # Cayley
    return classes


def tree_diameter_brute(order: int, edges) -> int:
    adj = {v: set() for v in range(order)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    best = 0
    for s in range(order):
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            frontier = nxt
        best = max(best, max(dist.values()))
    return best


def greedy_law_brute(tree, g: Graph):
    """Exact law of the greedy process by walking every branch recursively."""
    law = {}
    failure = Fraction(0)

    def rec(gamma, p):
        nonlocal failure
        i = len(gamma)
        if i == tree.order:
            law[tuple(gamma)] = law.get(tuple(gamma), 0) + p
            return
        free = [w for w in g.adj[gamma[tree.parent[i]]] if w not in gamma]
        if not free:
            failure += p
            return
        for w in free:
            rec(gamma + [w], p / len(free))

    for u, v in g.edges:
        for a in (u, v):
            rec([a], Fraction(1, 2 * g.m))
    return law, failure


# -- random instances -------------------------------------------------------


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph.from_edges(n, [e for e in combinations(range(n), 2) if rng.random() < p])


def random_tree_edges(rng: random.Random, order: int):
    return [(rng.randrange(i), i) for i in range(1, order)]


def random_regular(rng: random.Random, n: int, d: int, tries: int = 500) -> Graph | None:
    """Pairing model with restarts; None if no simple graph was hit."""
    if (n * d) % 2 or d >= n:
        return None
    for _ in range(tries):
        stubs = [v for v in range(n) for _ in range(d)]
        rng.shuffle(stubs)
        edges = set()
        ok = True
        for a, b in zip(stubs[::2], stubs[1::2]):
            e = (min(a, b), max(a, b))
            if a == b or e in edges:
                ok = False
                break
            edges.add(e)
        if ok:
            return Graph.from_edges(n, sorted(edges))
    return None
