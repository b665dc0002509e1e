import random
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings, strategies as st

from oracles import is_isomorphic_brute, iso_classes_brute, mon_brute
from treecount.counting import count_forest, count_injective, falling_factorial, matching_forest
from treecount.extremal import (
    canonical_code,
    class_count,
    clique_union_for,
    enumerate_graphs,
    find_min_forest,
    find_min_mon,
    forest_counterexample_check,
    search_forest_counterexamples,
    split_graph_min_check,
)
from treecount.graphs import Graph, make_clique_union
from treecount.trees import enumerate_trees, path_tree, star_tree

KNOWN = {
    4: [1, 1, 2, 3, 2, 1, 1],
    5: [1, 1, 2, 4, 6, 6, 6, 4, 2, 1, 1],
    6: [1, 1, 2, 5, 9, 15, 21, 24, 24, 21, 15, 9, 5, 2, 1, 1],
    7: [1, 1, 2, 5, 10, 21, 41, 65, 97, 131, 148, 148, 131, 97, 65, 41, 21, 10, 5, 2, 1, 1],
}


def test_small_examples():
    assert class_count(4, 3) == 3
    assert class_count(3, 3) == 1
    (k4,) = enumerate_graphs(4, 6)
    assert k4.m == 6
    with pytest.raises(ValueError):
        list(enumerate_graphs(9, 3))
    assert list(enumerate_graphs(4, 7)) == []


@pytest.mark.parametrize("n", sorted(KNOWN))
def test_class_counts_match_table(n):
    assert [class_count(n, m) for m in range(n * (n - 1) // 2 + 1)] == KNOWN[n]


@pytest.mark.parametrize("n", [4, 5, 6])
def test_class_counts_match_brute_force_dedup(n):
    for m in range(n * (n - 1) // 2 + 1):
        assert class_count(n, m) == iso_classes_brute(n, m)


@pytest.mark.parametrize("n, m", [(5, 4), (5, 6), (6, 7)])
def test_representatives_pairwise_non_isomorphic(n, m):
    reps = list(enumerate_graphs(n, m))
    assert all(g.n == n and g.m == m for g in reps)
    for g, h in combinations(reps, 2):
        assert not is_isomorphic_brute(g, h)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(0, 10**9))
def test_canonical_code_is_invariant(n, seed):
    rng = random.Random(seed)
    edges = [e for e in combinations(range(n), 2) if rng.random() < 0.5]
    p = list(range(n))
    rng.shuffle(p)
    relabelled = [(p[u], p[v]) for u, v in edges]
    assert canonical_code(n, edges) == canonical_code(n, relabelled)


def test_canonical_code_separates_classes():
    # same degree sequence, different graphs: C6 against two triangles
    c6 = [(i, (i + 1) % 6) for i in range(6)]
    tri2 = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
    assert canonical_code(6, c6) != canonical_code(6, tri2)


def test_find_min_mon_k4_only():
    for v in (2, 3, 4):
        for T in enumerate_trees(v):
            res = find_min_mon(4, 6, T)
            assert res.classes == 1 and res.minimum == 4 * falling_factorial(3, T.t)
            assert res.clique_union_is_minimizer


def test_find_min_mon_8_12_path():
    res = find_min_mon(8, 12, path_tree(3))
    assert res.clique_union_admissible
    assert res.classes == class_count(8, 12)
    assert res.minimum == min(res.counts.values())
    # recorded by exhaustive search: 2K4 attains the minimum and the bound
    assert res.minimum == 48 and res.clique_union_is_minimizer and res.margin == 0


def test_find_min_mon_6_6():
    res = find_min_mon(6, 6, path_tree(2))
    brute = min(count_injective(path_tree(2), g) for g in enumerate_graphs(6, 6))
    assert res.minimum == brute
    assert res.clique_union_is_minimizer  # 2K3
    assert "n,m,pattern" in res.to_csv()


def test_find_min_resample_against_brute_force():
    rng = random.Random(0)
    for n, m, T in [(6, 8, path_tree(3)), (7, 9, star_tree(3))]:
        res = find_min_mon(n, m, T)
        graphs = list(enumerate_graphs(n, m))
        sample = rng.sample(graphs, max(1, len(graphs) // 10))
        edges = [(T.parent[i], i) for i in range(1, T.order)]
        for g in sample:
            assert res.counts[canonical_code(n, g.edges)] == mon_brute(edges, T.order, g)
            assert res.minimum <= res.counts[canonical_code(n, g.edges)]
        for mz in res.minimizers:
            assert count_injective(T, Graph.from_edges(n, mz)) == res.minimum


def test_clique_union_meets_bound_when_admissible():
    for n in range(2, 9):
        for s in range(2, n + 1):
            if n % s:
                continue
            m = (n // s) * s * (s - 1) // 2
            g = clique_union_for(n, m)
            assert g == make_clique_union(n // s, s)
            for t in range(0, s):
                assert count_injective(path_tree(t), g) == n * falling_factorial(s - 1, t)


def test_forest_check_examples():
    rep = forest_counterexample_check(2, 12, 3)
    assert rep.clique_union["count"] == count_forest(matching_forest(2), make_clique_union(3, 4))
    rep = forest_counterexample_check(1, 12, 3)
    assert rep.clique_union["count"] == 2 * rep.clique_union["m"]
    assert all(a["count"] == 2 * a["m"] for a in rep.alternatives)
    rep = forest_counterexample_check(0, 12, 3)
    assert rep.clique_union["count"] == 1 and all(a["count"] == 1 for a in rep.alternatives)
    with pytest.raises(ValueError):
        forest_counterexample_check(2, 10, 3)


def test_forest_counterexample_matched():
    rep = forest_counterexample_check(2, 12, 5)
    assert rep.clique_union["count"] == 2520
    split = next(a for a in rep.alternatives if a["graph"].startswith("split"))
    assert split["matched_m"] and split["count"] == 1944
    assert "split:n=12,a=3" in rep.fewer_than_clique_union


def test_forest_search():
    found = search_forest_counterexamples(2, 12)
    assert [(c.n, c.d) for c in found] == [(8, 3), (12, 5)]


def test_split_check():
    rep = split_graph_min_check(2, 6, 9)
    assert rep.split_is_minimizer
    assert rep.minimum == find_min_forest(6, 9, 2).minimum
    rep = split_graph_min_check(1, 5, 7)
    assert rep.split_is_minimizer and rep.minimizers == class_count(5, 7)  # all graphs tie
    rep = split_graph_min_check(2, 5, 4)  # the star K_{1,4}: no two disjoint edges
    assert rep.a == 1 and rep.split_count == 0 and rep.split_is_minimizer
    with pytest.raises(ValueError):
        split_graph_min_check(2, 5, 5)
