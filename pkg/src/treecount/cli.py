"""Command-line entry point. Every command writes one report document that
embeds the configuration it ran with."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from itertools import combinations

from . import counting, embedding, extremal, lemmas
from .graphs import Graph, GraphFormatError, load_graph, min_degree_prune, parse_family
from .trees import RootedTree, TreeError, build_rooted_tree, parse_tree_spec

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3, 4

MAX_NODES_ENV = "TREECOUNT_MAX_NODES"
MAX_STATES_ENV = "TREECOUNT_MAX_STATES"


class InputError(Exception):
    """An input file could not be read or parsed."""


# -- input ------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def resolve_graph(source: str) -> Graph:
    """A family spec such as ``cycle:n=5``, or an edge-list file
    (``file:PATH`` or any existing path)."""
    if source.startswith("file:") or os.path.exists(source):
        path = source[5:] if source.startswith("file:") else source
        try:
            return load_graph(_read(path))
        except GraphFormatError as exc:
            raise InputError(f"{path}: {exc}") from exc
    return parse_family(source).build()


def resolve_tree(source: str) -> RootedTree:
    """A tree spec (``path:t=3``, ``catalog:v=5,i=1``, ``edges:0-1,1-2``)
    or a file of ``u v`` lines."""
    if source.startswith("file:") or os.path.exists(source):
        path = source[5:] if source.startswith("file:") else source
        pairs = []
        for lineno, line in enumerate(_read(path).splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2 or not all(p.isdigit() for p in parts):
                raise InputError(f"{path}:{lineno}: expected 'u v'")
            pairs.append((int(parts[0]), int(parts[1])))
        try:
            return build_rooted_tree(pairs)
        except TreeError as exc:
            raise InputError(f"{path}: {exc}") from exc
    return parse_tree_spec(source)


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _env_budget(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value <= 0:
        raise ValueError(f"{name} must be a positive integer")
    return value


# -- serialisation ----------------------------------------------------------


def plain(obj):
    """JSON-safe copy: fractions as strings, non-finite floats as null."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    return obj


def render(doc: dict, fmt: str, csv_body: str | None = None) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        if csv_body is not None:
            return "# " + json.dumps(doc["config"], sort_keys=True) + "\n" + csv_body
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for key, value in _flatten(doc):
            w.writerow([key, value])
        return buf.getvalue()
    return "".join(f"{k}: {v}\n" for k, v in _flatten(doc))


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        for i, x in enumerate(obj):
            yield from _flatten(x, f"{prefix}{i}.")
    else:
        yield prefix[:-1], json.dumps(obj) if isinstance(obj, list) else obj


# -- commands ---------------------------------------------------------------


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise ValueError(f"--{name.replace('_', '-')} is required for {args.command}")


def cmd_count(args):
    _need(args, "graph", "tree")
    g, tree = resolve_graph(args.graph), resolve_tree(args.tree)
    result = {
        "graph": g.summary(),
        "tree": tree.describe(),
        "mon_count": counting.count_injective(tree, g, args.max_nodes),
        "hom_count": counting.count_hom_tree(tree, g),
        "walks": counting.count_walks(g, tree.t),
        "nb_walks": counting.count_nb_walks(g, tree.t),
    }
    return result, "counted"


def cmd_bound(args):
    _need(args, "graph", "tree")
    g, tree = resolve_graph(args.graph), resolve_tree(args.tree)
    rep = counting.main_bound_check(tree, g, args.max_nodes)
    adv = counting.adversary_lower_bound(g, tree.t)
    result = {
        "graph": g.summary(),
        "tree": tree.describe(),
        "mon": rep.mon_count,
        "hom": rep.hom_count,
        "bound": str(rep.bound),
        "holds": rep.holds,
        "equality": rep.equality,
        "equality_classification": rep.equality_classification,
        "adversary_bound": {"value": str(adv.value), "vacuous": adv.vacuous, "holds": rep.mon_count >= adv.value},
    }
    if g.m and g.bipartition() is not None:
        bb = counting.bipartite_bound(g, tree)
        result["bipartite_bound"] = {
            "parts": [bb.a, bb.b],
            "tree_parts": [bb.t1, bb.t2],
            "x0_side_first": str(bb.x0_side_first),
            "swapped": None if bb.swapped is None else str(bb.swapped),
        }
    verdict = "equality" if rep.equality else ("holds" if rep.holds else "fails")
    return result, verdict


def cmd_entropy(args):
    _need(args, "graph", "tree")
    g, tree = resolve_graph(args.graph), resolve_tree(args.tree)
    dist = embedding.exact_distribution(tree, g, args.max_states)
    try:
        rep = embedding.entropy_report(dist, args.tol)
    except embedding.ConsistencyError as exc:
        return {"graph": g.summary(), "tree": tree.describe(), "error": str(exc)}, "identity-violated"
    result = {"graph": g.summary(), "tree": tree.describe(), **rep.to_dict()}
    return result, "conditioned" if rep.conditioned else "identities-hold"


def cmd_sample(args):
    _need(args, "graph", "tree")
    g, tree = resolve_graph(args.graph), resolve_tree(args.tree)
    freq = embedding.sample_frequencies(tree, g, args.samples, args.seed)
    dead = freq.pop("dead_end", 0)
    result = {
        "graph": g.summary(),
        "tree": tree.describe(),
        "samples": args.samples,
        "dead_ends": dead,
        "frequencies": [[list(k), v] for k, v in sorted(freq.items())],
    }
    if args.exact:
        dist = embedding.exact_distribution(tree, g, args.max_states)
        if dead:
            freq["dead_end"] = dead
        result["total_variation"] = embedding.total_variation(freq, dist)
    return result, "sampled"


def cmd_lemmas(args):
    _need(args, "graph", "tree")
    g, tree = resolve_graph(args.graph), resolve_tree(args.tree)
    dist = embedding.exact_distribution(tree, g, args.max_states)
    t = tree.t
    twist = {"checked": 0, "exact": 0, "bijections_checked": 0, "bijections_ok": 0}
    ratio: dict[str, int] = {}
    for i in range(1, t):
        for u, v in combinations(range(g.n), 2):
            twist["checked"] += 1
            twist["exact"] += lemmas.check_twist_identity(dist, i, u, v).holds
            b = lemmas.check_embedding_twist_bijection(dist, i, u, v)
            if b.size:
                twist["bijections_checked"] += 1
                twist["bijections_ok"] += b.bijective and b.probabilities_equal
        for p in lemmas.enumerate_paths(g, dist.anchor(i)):
            if p[0] < p[-1]:
                for c in lemmas.check_reverse_ratio(dist, i, p).checks:
                    key = f"{c.name}:{c.verdict}"
                    ratio[key] = ratio.get(key, 0) + 1
    jensen = {}
    for k in range(t):
        if g.n and g.min_degree > k:
            jensen[str(k)] = lemmas.jensen_error_identity(g.degrees, k).residual
    pruned, trace, kept = min_degree_prune(g)
    steps_ok = all(
        (s.n_before - 1) * counting.falling_factorial(s.d_after, t) >= s.n_before * counting.falling_factorial(s.d_before, t)
        for s in trace
    )
    result = {
        "graph": g.summary(),
        "tree": tree.describe(),
        "failure_mass": str(dist.failure_mass),
        "twist": twist,
        "ratio_verdicts": ratio,
        "ratio_hypothesis_met": lemmas.ratio_hypothesis(g, t),
        "jensen_residuals": jensen,
        "prune": {"deleted": [s.vertex for s in trace], "kept": kept, "steps_monotone": steps_ok,
                  "final": pruned.summary()},
    }
    ok = twist["exact"] == twist["checked"] and twist["bijections_ok"] == twist["bijections_checked"]
    ok = ok and not any(k.endswith(":fails") for k in ratio)
    ok = ok and all(r <= args.tol for r in jensen.values())
    return result, "consistent" if ok else "discrepancy"


def cmd_d0(args):
    _need(args, "t")
    res = lemmas.empirical_d0(args.t, args.grid)
    return res.to_dict(), "found"


def cmd_search(args):
    _need(args, "n", "m")
    if (args.tree is None) == (args.forest_k is None):
        raise ValueError("search needs exactly one of --tree and --forest-k")
    if args.tree is not None:
        res = extremal.find_min_mon(args.n, args.m, resolve_tree(args.tree), args.tree)
    else:
        res = extremal.find_min_forest(args.n, args.m, args.forest_k)
    verdict = {True: "clique-union-minimal", False: "clique-union-not-minimal", None: "no-clique-union"}
    return res.to_dict(), verdict[res.clique_union_is_minimizer], res.to_csv()


def cmd_forest(args):
    k = args.k
    if args.search:
        found = extremal.search_forest_counterexamples(k, args.n_max)
        return {"k": k, "n_max": args.n_max, "found": [c.to_dict() for c in found]}, (
            "counterexample-found" if found else "none-found")
    if args.m is not None:
        _need(args, "n")
        rep = extremal.split_graph_min_check(k, args.n, args.m)
        return rep.to_dict(), "split-minimal" if rep.split_is_minimizer else "split-not-minimal"
    _need(args, "n", "d")
    rep = extremal.forest_counterexample_check(k, args.n, args.d)
    return rep.to_dict(), "clique-union-beaten" if rep.fewer_than_clique_union else "clique-union-not-beaten"


COMMANDS = {
    "count": cmd_count,
    "bound": cmd_bound,
    "entropy": cmd_entropy,
    "sample": cmd_sample,
    "lemmas": cmd_lemmas,
    "d0": cmd_d0,
    "search": cmd_search,
    "forest": cmd_forest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="family spec (clique_union:k=3,s=4) or edge-list file")
    common.add_argument("--tree", help="tree spec (path:t=3, star:t=2, catalog:v=5,i=0, edges:0-1,1-2) or file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-nodes", type=_positive_int, default=None,
                        help=f"backtracking budget (env {MAX_NODES_ENV})")
    common.add_argument("--max-states", type=_positive_int, default=None,
                        help=f"exact-law state budget (env {MAX_STATES_ENV})")
    common.add_argument("--tol", type=float, default=embedding.RESIDUAL_TOL)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")

    parser = argparse.ArgumentParser(prog="treecount", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("count", "bound", "entropy", "lemmas"):
        sub.add_parser(name, parents=[common])
    sp = sub.add_parser("sample", parents=[common])
    sp.add_argument("--samples", type=_positive_int, default=1000)
    sp.add_argument("--exact", action="store_true", help="also report TV distance to the exact law")
    sp = sub.add_parser("d0", parents=[common])
    sp.add_argument("--t", type=int)
    sp.add_argument("--grid", default=str(lemmas.GridSpec()))
    sp = sub.add_parser("search", parents=[common])
    sp.add_argument("--n", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--forest-k", type=int)
    sp = sub.add_parser("forest", parents=[common])
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--n", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--m", type=int, help="run the split-graph minimality check instead")
    sp.add_argument("--search", action="store_true")
    sp.add_argument("--n-max", type=int, default=30)
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items())}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on usage errors
    try:
        if args.max_nodes is None:
            args.max_nodes = _env_budget(MAX_NODES_ENV, counting.DEFAULT_NODE_BUDGET)
        if args.max_states is None:
            args.max_states = _env_budget(MAX_STATES_ENV, embedding.DEFAULT_MAX_STATES)
        out = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except counting.BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    result, verdict = out[0], out[1]
    csv_body = out[2] if len(out) > 2 and args.format == "csv" else None
    doc = plain({"command": args.command, "config": _config(args), "verdict": verdict, "result": result})
    sys.stdout.write(render(doc, args.format, csv_body))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
