"""The random greedy embedding of a tree: sampler, exact law, Gamma-set
queries and the per-level entropy decomposition.

Levels follow the BFS order of the tree. For level ``i < t`` the "second
endpoint" of a partial embedding is the image of ``x_{a(i+1)}``, the vertex
the next tree vertex hangs off.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple

from .counting import BudgetExceeded, falling_factorial
from .graphs import Graph
from .trees import RootedTree

DEFAULT_MAX_STATES = 2_000_000
RESIDUAL_TOL = 1e-9

Embedding = tuple[int, ...]


class ConsistencyError(RuntimeError):
    """An identity that must hold up to rounding was violated (a bug trap)."""


class DeadEnd(NamedTuple):
    level: int  # tree vertex that could not be placed
    partial: Embedding


def is_partial_embedding(tree: RootedTree, g: Graph, gamma: Embedding) -> bool:
    if len(set(gamma)) != len(gamma) or len(gamma) > tree.order:
        return False
    return all(g.has_edge(gamma[tree.parent[j]], gamma[j]) for j in range(1, len(gamma)))


def free_neighbours(g: Graph, gamma: Embedding, v: int) -> list[int]:
    used = set(gamma)
    return sorted(w for w in g.adj[v] if w not in used)


def sample_greedy(tree: RootedTree, g: Graph, seed: int | random.Random = 0) -> Embedding | DeadEnd:
    """Draw one greedy embedding.

    x_0 goes to v with probability d(v)/2m (the tail of a uniform oriented
    edge); each later x_i is uniform over the unused neighbours of the image
    of its parent.
    """
    if g.m == 0:
        raise ValueError("greedy embedding needs at least one edge")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    idx = rng.randrange(2 * g.m)
    gamma = [g.edges[idx >> 1][idx & 1]]
    for i in range(1, tree.order):
        choices = free_neighbours(g, gamma, gamma[tree.parent[i]])
        if not choices:
            return DeadEnd(i, tuple(gamma))
        gamma.append(choices[rng.randrange(len(choices))])
    return tuple(gamma)


def sample_frequencies(tree: RootedTree, g: Graph, samples: int, seed: int = 0) -> Counter:
    """Empirical outcome counts; every dead end is pooled under ``"dead_end"``."""
    rng = random.Random(seed)
    out: Counter = Counter()
    for _ in range(samples):
        res = sample_greedy(tree, g, rng)
        out["dead_end" if isinstance(res, DeadEnd) else res] += 1
    return out


@dataclass
class ExactDistribution:
    """Exact law of the greedy process.

    ``levels[i]`` maps each reachable gamma^i to P(phi^i = gamma^i);
    ``failure[i]`` is the mass that hit a dead end before level i. When
    ``conditioned`` is set the law has been conditioned on reaching level t.
    """

    tree: RootedTree
    graph: Graph
    levels: list[dict[Embedding, Fraction]]
    failure: list[Fraction]
    conditioned: bool = False
    _deg: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        self._deg = self.graph.degrees

    @property
    def t(self) -> int:
        return self.tree.t

    @property
    def failure_mass(self) -> Fraction:
        return self.failure[-1]

    def mass(self, i: int) -> Fraction:
        return sum(self.levels[i].values(), Fraction(0))

    def anchor(self, i: int) -> int:
        """Index of x_{a(i+1)}, the attachment point after level i."""
        if not 0 <= i < self.t:
            raise ValueError(f"level {i} has no successor (t = {self.t})")
        return self.tree.parent[i + 1]

    def conditioned_on_success(self) -> "ExactDistribution":
        """The law conditioned on the process never hitting a dead end."""
        if self.failure_mass == 0:
            return self
        alive = 1 - self.failure_mass
        if alive == 0:
            raise ValueError("every run hits a dead end")
        t = self.t
        levels: list[dict[Embedding, Fraction]] = [dict() for _ in range(t + 1)]
        for gamma, p in self.levels[t].items():
            q = p / alive
            for i in range(t + 1):
                key = gamma[: i + 1]
                levels[i][key] = levels[i].get(key, Fraction(0)) + q
        return ExactDistribution(self.tree, self.graph, levels, [Fraction(0)] * (t + 1), True)

    def probability(self, i: int, pred: Callable[[Embedding], bool]) -> Fraction:
        return sum((p for gamma, p in self.levels[i].items() if pred(gamma)), Fraction(0))


def exact_distribution(tree: RootedTree, g: Graph, max_states: int = DEFAULT_MAX_STATES) -> ExactDistribution:
    """Forward recursion P(gamma + w) = P(gamma) / |N_+|."""
    if g.m == 0:
        raise ValueError("greedy embedding needs at least one edge")
    two_m = 2 * g.m
    level = {(v,): Fraction(g.degree(v), two_m) for v in range(g.n) if g.degree(v) > 0}
    levels = [level]
    failure = [Fraction(0)]
    stored = len(level)
    for i in range(1, tree.order):
        a = tree.parent[i]
        nxt: dict[Embedding, Fraction] = {}
        lost = Fraction(0)
        for gamma, p in level.items():
            choices = free_neighbours(g, gamma, gamma[a])
            if not choices:
                lost += p
                continue
            q = p / len(choices)
            for w in choices:
                nxt[gamma + (w,)] = q
        stored += len(nxt)
        if stored > max_states:
            raise BudgetExceeded(f"exact distribution exceeded {max_states} stored embeddings")
        failure.append(failure[-1] + lost)
        levels.append(nxt)
        level = nxt
    return ExactDistribution(tree, g, levels, failure)


# -- Gamma sets -------------------------------------------------------------


def classify_complete(tree: RootedTree, g: Graph, gamma: Embedding) -> bool:
    """Completeness of gamma in Mon(T^i, G), i = len(gamma) - 1 < t.

    With k = a(i+1): every x_j, 0 < j < k, that is not a leaf of T^k must
    have its image adjacent to both gamma_0 and gamma_k.
    """
    i = len(gamma) - 1
    if not 0 <= i < tree.t:
        raise ValueError("completeness needs a level below t")
    k = tree.parent[i + 1]
    g0, gk = gamma[0], gamma[k]
    for j in range(1, k):
        if tree.is_leaf_in_prefix(j, k):
            continue
        if not (g.has_edge(g0, gamma[j]) and g.has_edge(gk, gamma[j])):
            return False
    return True


@dataclass(frozen=True)
class GammaSelector:
    """An event on phi^i.

    kind: ``from`` (gamma_0 = u), ``to`` (gamma_{a(i+1)} = v), ``pair``
    (both) or ``path`` (images along x_0 -> x_{a(i+1)} equal ``path``).
    restrict: ``all``, ``nc`` (non-complete only) or ``c`` (complete only).
    """

    kind: str
    level: int
    u: int | None = None
    v: int | None = None
    path: Embedding | None = None
    restrict: str = "all"

    @classmethod
    def from_(cls, i, u, restrict="all"):
        return cls("from", i, u=u, restrict=restrict)

    @classmethod
    def to(cls, i, v, restrict="all"):
        return cls("to", i, v=v, restrict=restrict)

    @classmethod
    def pair(cls, i, u, v, restrict="all"):
        return cls("pair", i, u=u, v=v, restrict=restrict)

    @classmethod
    def along(cls, i, path, restrict="all"):
        return cls("path", i, path=tuple(path), restrict=restrict)


def selector_predicate(dist: ExactDistribution, sel: GammaSelector) -> Callable[[Embedding], bool]:
    tree, g = dist.tree, dist.graph
    i = sel.level
    if not 0 <= i <= dist.t:
        raise ValueError(f"level {i} out of range")
    if sel.restrict not in ("all", "nc", "c"):
        raise ValueError(f"unknown restriction {sel.restrict!r}")
    if sel.kind == "from":
        if sel.restrict != "all":
            dist.anchor(i)
        base = lambda gm: gm[0] == sel.u
    elif sel.kind == "to":
        k = dist.anchor(i)
        base = lambda gm: gm[k] == sel.v
    elif sel.kind == "pair":
        k = dist.anchor(i)
        base = lambda gm: gm[0] == sel.u and gm[k] == sel.v
    elif sel.kind == "path":
        route = tree.root_path(dist.anchor(i))
        if sel.path is None or len(sel.path) != len(route):
            raise ValueError(f"path selector needs {len(route)} vertices at level {i}")
        p = sel.path
        base = lambda gm: all(gm[r] == x for r, x in zip(route, p))
    else:
        raise ValueError(f"unknown selector kind {sel.kind!r}")
    if sel.restrict == "all":
        return base
    want_complete = sel.restrict == "c"
    return lambda gm: base(gm) and classify_complete(tree, g, gm) == want_complete


def gamma_probability(dist: ExactDistribution, sel: GammaSelector) -> Fraction:
    return dist.probability(sel.level, selector_predicate(dist, sel))


def pair_table(dist: ExactDistribution, i: int, restrict: str = "all") -> dict[tuple[int, int], Fraction]:
    """P(phi^i in Gamma_i(u, v)) for every (u, v) with positive mass."""
    k = dist.anchor(i)
    out: dict[tuple[int, int], Fraction] = {}
    for gamma, p in dist.levels[i].items():
        if restrict != "all" and classify_complete(dist.tree, dist.graph, gamma) != (restrict == "c"):
            continue
        key = (gamma[0], gamma[k])
        out[key] = out.get(key, Fraction(0)) + p
    return out


# -- entropy ----------------------------------------------------------------


def _log(p: Fraction) -> float:
    return math.log(p.numerator) - math.log(p.denominator)


def entropy(law: Iterable[Fraction]) -> float:
    return math.fsum(-p * _log(p) for p in law if p > 0)


def conditional_entropy(dist: ExactDistribution, i: int) -> float:
    """H[phi^{i+1} | phi^i] computed from the two laws directly."""
    lower = dist.levels[i]
    terms = []
    for gamma, p in dist.levels[i + 1].items():
        terms.append(float(p) * _log(lower[gamma[:-1]] / p))
    return math.fsum(terms)


class RValue(NamedTuple):
    value: float
    convention: bool  # conditioning event was null


def r_value(dist: ExactDistribution, i: int, v: int) -> RValue:
    """Mean of log(d(v) - |N(v) cap im gamma|) over gamma with
    gamma_{a(i+1)} = v, weighted by the law.

    On a null event the value is log(d(v) - i) (nan if d(v) <= i), flagged.
    """
    k = dist.anchor(i)
    g = dist.graph
    dv = g.degree(v)
    nbrs = g.adj[v]
    weight = Fraction(0)
    acc = []
    for gamma, p in dist.levels[i].items():
        if gamma[k] != v:
            continue
        free = dv - sum(1 for x in gamma if x in nbrs)
        weight += p
        acc.append((p, math.log(free) if free > 0 else -math.inf))
    if weight == 0:
        return RValue(math.log(dv - i) if dv > i else math.nan, True)
    return RValue(math.fsum(float(p / weight) * lg for p, lg in acc), False)


@dataclass
class LevelTerms:
    i: int
    conditional_entropy: float
    log_d_minus_i: float | None
    pi1: float | None
    pi2: float | None
    pi3: float | None
    residual: float
    collapse_holds: bool  # P(Gamma_i(v,*)) == d(v)/2m for all v
    degenerate_vertices: list[int]  # 0 < d(v) <= i, where Pi^1, Pi^2 are undefined
    r_values: dict[int, RValue]

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "conditional_entropy": self.conditional_entropy,
            "log_d_minus_i": self.log_d_minus_i,
            "pi1": self.pi1,
            "pi2": self.pi2,
            "pi3": self.pi3,
            "residual": self.residual,
            "collapse_holds": self.collapse_holds,
            "degenerate_vertices": self.degenerate_vertices,
            "r_values": {
                str(v): {"value": None if math.isnan(r.value) else r.value, "convention": r.convention}
                for v, r in sorted(self.r_values.items())
            },
        }


@dataclass
class EntropyReport:
    h_total: float
    h_first: float | None
    log_two_m: float
    levels: list[LevelTerms]
    chain_residual: float | None
    model_bound: float | None  # log(n (d)_t), None when (d)_t <= 0
    slack: float | None
    support_size: int
    log_support: float
    uniform: bool
    failure_mass: Fraction
    conditioned: bool

    def to_dict(self) -> dict:
        return {
            "h_total": self.h_total,
            "h_first": self.h_first,
            "log_two_m": self.log_two_m,
            "chain_residual": self.chain_residual,
            "model_bound": self.model_bound,
            "slack": self.slack,
            "support_size": self.support_size,
            "log_support": self.log_support,
            "uniform": self.uniform,
            "failure_mass": str(self.failure_mass),
            "conditioned": self.conditioned,
            "levels": [lv.to_dict() for lv in self.levels],
        }


def _level_terms(dist: ExactDistribution, i: int) -> LevelTerms:
    g = dist.graph
    two_m = 2 * g.m
    d = g.average_degree
    k = dist.anchor(i)
    deg = g.degrees
    active = [v for v in range(g.n) if deg[v] > 0]

    from_mass = {v: Fraction(0) for v in active}
    to_mass = {v: Fraction(0) for v in active}
    for gamma, p in dist.levels[i].items():
        from_mass[gamma[0]] += p
        to_mass[gamma[k]] += p
    collapse = all(from_mass[v] == Fraction(deg[v], two_m) for v in active)

    r = {v: r_value(dist, i, v) for v in active}
    h = conditional_entropy(dist, i)
    degenerate = [v for v in active if deg[v] <= i]

    pi3 = None
    if not any(math.isnan(r[v].value) for v in active if from_mass[v] != to_mass[v]):
        pi3 = math.fsum(float(from_mass[v] - to_mass[v]) * r[v].value
                        for v in active if from_mass[v] != to_mass[v])
    # Pi^1, Pi^2 sum over vertices with d(v) > i only; degenerate ones are listed
    ok = [v for v in active if deg[v] > i]
    w = {v: Fraction(deg[v], two_m) for v in ok}
    log_di = math.log(d - i) if d > i else None
    pi1 = None
    if log_di is not None:
        pi1 = math.fsum(float(w[v]) * math.log(deg[v] - i) for v in ok) - log_di
    pi2 = math.fsum(float(w[v]) * (r[v].value - math.log(deg[v] - i)) for v in ok)

    if degenerate or pi1 is None or pi3 is None:
        # only the unsplit form is an identity here: H = sum_v P(Gamma(*, v)) r_i(v)
        direct = math.fsum(float(to_mass[v]) * r[v].value for v in active if to_mass[v] > 0)
        residual = h - direct
    else:
        residual = h - log_di - pi1 - pi2 + pi3
    return LevelTerms(i, h, log_di, pi1, pi2, pi3, residual, collapse, degenerate, r)


def entropy_report(dist: ExactDistribution, tol: float = RESIDUAL_TOL) -> EntropyReport:
    """Entropy of phi, its chain-rule terms and the Pi decomposition.

    A law with dead ends is replaced by its conditioning on success and the
    report is flagged; identities are only enforced on failure-free laws.
    """
    raw_failure = dist.failure_mass
    law = dist.conditioned_on_success()
    g = law.graph
    t = law.t
    h_total = entropy(law.levels[t].values())
    log_two_m = math.log(2 * g.m)
    h_first = entropy(law.levels[1].values()) if t >= 1 else None
    levels = [_level_terms(law, i) for i in range(1, t)]
    chain = None
    if t >= 1:
        chain = h_total - h_first - math.fsum(lv.conditional_entropy for lv in levels)

    ff = falling_factorial(g.average_degree, t)
    model = math.log(g.n * ff) if ff > 0 else None
    support = len(law.levels[t])
    probs = set(law.levels[t].values())

    report = EntropyReport(
        h_total=h_total,
        h_first=h_first,
        log_two_m=log_two_m,
        levels=levels,
        chain_residual=chain,
        model_bound=model,
        slack=h_total - model if model is not None else None,
        support_size=support,
        log_support=math.log(support),
        uniform=len(probs) == 1,
        failure_mass=raw_failure,
        conditioned=law.conditioned,
    )
    if raw_failure == 0:
        _enforce(report, tol)
    return report


def _enforce(report: EntropyReport, tol: float) -> None:
    if report.chain_residual is not None and abs(report.chain_residual) > tol:
        raise ConsistencyError(f"chain rule residual {report.chain_residual:.3e}")
    if report.h_first is not None and abs(report.h_first - report.log_two_m) > tol:
        raise ConsistencyError("first edge is not uniform over oriented edges")
    for lv in report.levels:
        if not lv.collapse_holds:
            raise ConsistencyError(f"level {lv.i}: P(Gamma(v,*)) differs from d(v)/2m")
        if abs(lv.residual) > tol:
            raise ConsistencyError(f"level {lv.i}: decomposition residual {lv.residual:.3e}")
    if report.h_total > report.log_support + tol:
        raise ConsistencyError("entropy exceeds log of support size")


def total_variation(freq: Counter, dist: ExactDistribution) -> float:
    """TV distance between sampled outcome counts and the exact law."""
    total = sum(freq.values())
    exact = {gamma: p for gamma, p in dist.levels[dist.t].items()}
    keys = set(exact) | {k for k in freq if k != "dead_end"}
    tv = math.fsum(abs(freq.get(k, 0) / total - float(exact.get(k, 0))) for k in keys)
    tv += abs(freq.get("dead_end", 0) / total - float(dist.failure_mass))
    return tv / 2
