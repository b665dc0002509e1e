"""Exact counting of tree embeddings, the greedy embedding law, and
desk-scale checks of the entropy argument for n (d)_t lower bounds."""

from .counting import (
    count_forest,
    count_hom_tree,
    count_injective,
    count_nb_walks,
    count_walks,
    falling_factorial,
    main_bound,
    main_bound_check,
)
from .embedding import entropy_report, exact_distribution, sample_greedy
from .graphs import Graph, load_graph, make_clique_union, min_degree_prune, parse_family
from .trees import RootedTree, build_rooted_tree, enumerate_trees, parse_tree_spec, path_tree, star_tree

__all__ = [
    "Graph",
    "RootedTree",
    "build_rooted_tree",
    "count_forest",
    "count_hom_tree",
    "count_injective",
    "count_nb_walks",
    "count_walks",
    "entropy_report",
    "enumerate_trees",
    "exact_distribution",
    "falling_factorial",
    "load_graph",
    "main_bound",
    "main_bound_check",
    "make_clique_union",
    "min_degree_prune",
    "parse_family",
    "parse_tree_spec",
    "path_tree",
    "sample_greedy",
    "star_tree",
]
