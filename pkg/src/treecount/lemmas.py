"""Checks of the combinatorial machinery behind the entropy bound: path
reversal and twists, reverse-ratio bounds, the twist cancellation identity,
the Jensen error identity, the Sigma terms and an empirical d_0(t) search."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .embedding import ExactDistribution, GammaSelector, classify_complete, gamma_probability
from .graphs import Graph

Path = tuple[int, ...]


class NotCompleteError(ValueError):
    pass


def is_path(g: Graph, p: Sequence[int]) -> bool:
    return len(set(p)) == len(p) and all(g.has_edge(a, b) for a, b in zip(p, p[1:]))


def reverse_path(p: Sequence[int]) -> Path:
    return tuple(reversed(p))


def missing_completeness_edge(g: Graph, p: Sequence[int]) -> tuple[int, int] | None:
    """First missing edge {p_0, p_j} or {p_k, p_j}, 0 < j < k, if any."""
    k = len(p) - 1
    for j in range(1, k):
        for end in (p[0], p[k]):
            if not g.has_edge(end, p[j]):
                return end, p[j]
    return None


def is_complete_path(g: Graph, p: Sequence[int]) -> bool:
    return missing_completeness_edge(g, p) is None


def twist_path(g: Graph, p: Sequence[int]) -> Path:
    """Swap the endpoints of a complete path, keeping the interior."""
    p = tuple(p)
    if not is_path(g, p):
        raise ValueError(f"{p} is not a path in G")
    missing = missing_completeness_edge(g, p)
    if missing is not None:
        raise NotCompleteError(f"path {p} is not complete: missing edge {missing}")
    if len(p) <= 1:
        return p
    out = (p[-1],) + p[1:-1] + (p[0],)
    assert is_path(g, out)
    return out


def twist_embedding(gamma: Sequence[int]) -> Path:
    """(gamma_k, gamma_1, ..., gamma_{k-1}, gamma_0) for gamma in Mon(T^k, G)."""
    gamma = tuple(gamma)
    if len(gamma) <= 1:
        return gamma
    return (gamma[-1],) + gamma[1:-1] + (gamma[0],)


def enumerate_paths(g: Graph, k: int, start: int | None = None) -> list[Path]:
    """All paths with k edges (optionally starting at ``start``)."""
    out: list[Path] = []

    def grow(p: list[int]):
        if len(p) == k + 1:
            out.append(tuple(p))
            return
        for w in sorted(g.adj[p[-1]]):
            if w not in p:
                p.append(w)
                grow(p)
                p.pop()

    for s in ([start] if start is not None else range(g.n)):
        grow([s])
    return out


# -- ratio checks -----------------------------------------------------------


class RatioCheck(NamedTuple):
    name: str
    numerator: Fraction
    denominator: Fraction
    ratio: Fraction | None
    within: bool | None
    verdict: str  # holds | hypothesis-unmet | fails | inapplicable


@dataclass
class RatioReport:
    level: int
    path: Path
    lower: Fraction
    upper: Fraction
    hypothesis_met: bool
    checks: list[RatioCheck]

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "path": list(self.path),
            "lower": str(self.lower),
            "upper": str(self.upper),
            "hypothesis_met": self.hypothesis_met,
            "checks": [
                {
                    "name": c.name,
                    "numerator": str(c.numerator),
                    "denominator": str(c.denominator),
                    "ratio": None if c.ratio is None else str(c.ratio),
                    "within": c.within,
                    "verdict": c.verdict,
                }
                for c in self.checks
            ],
        }


def ratio_hypothesis(g: Graph, t: int) -> bool:
    """delta >= d/4 and 8t^2 < d, so that the bracket is not vacuous."""
    d = g.average_degree
    return 4 * g.min_degree >= d and 8 * t * t < d


def _ratio(name: str, num: Fraction, den: Fraction, lo: Fraction, hi: Fraction, hyp: bool) -> RatioCheck:
    if den == 0:
        return RatioCheck(name, num, den, None, None, "inapplicable")
    r = num / den
    within = lo <= r <= hi
    verdict = "holds" if within else ("fails" if hyp else "hypothesis-unmet")
    return RatioCheck(name, num, den, r, within, verdict)


def check_reverse_ratio(dist: ExactDistribution, i: int, p: Sequence[int]) -> RatioReport:
    """P(Gamma_i(p)) / P(Gamma_i(reverse p)) against 1 +- 8t^2/d, plus the
    pair, from/to and non-complete pair variants for the endpoints of p."""
    g = dist.graph
    p = tuple(p)
    t = dist.t
    b = Fraction(8 * t * t) / g.average_degree
    lo, hi = 1 - b, 1 + b
    hyp = ratio_hypothesis(g, t)
    u, v = p[0], p[-1]
    q = lambda sel: gamma_probability(dist, sel)
    checks = [
        _ratio("path", q(GammaSelector.along(i, p)), q(GammaSelector.along(i, reverse_path(p))), lo, hi, hyp),
        _ratio("pair", q(GammaSelector.pair(i, u, v)), q(GammaSelector.pair(i, v, u)), lo, hi, hyp),
        _ratio("from_to", q(GammaSelector.from_(i, u)), q(GammaSelector.to(i, u)), lo, hi, hyp),
        _ratio("pair_nc", q(GammaSelector.pair(i, u, v, "nc")), q(GammaSelector.pair(i, v, u, "nc")), lo, hi, hyp),
    ]
    return RatioReport(i, p, lo, hi, hyp, checks)


class TwistIdentity(NamedTuple):
    lhs: Fraction  # P(Gamma_i(v,u)) - P(Gamma_i(u,v))
    rhs: Fraction  # same over non-complete embeddings
    holds: bool


def check_twist_identity(dist: ExactDistribution, i: int, u: int, v: int) -> TwistIdentity:
    q = lambda a, b, r="all": gamma_probability(dist, GammaSelector.pair(i, a, b, r))
    lhs = q(v, u) - q(u, v)
    rhs = q(v, u, "nc") - q(u, v, "nc")
    return TwistIdentity(lhs, rhs, lhs == rhs)


class TwistBijection(NamedTuple):
    size: int
    bijective: bool
    probabilities_equal: bool


def complete_restrictions(dist: ExactDistribution, i: int, u: int, v: int) -> set[Path]:
    """Restrictions to T^{a(i+1)} of the complete gamma in Gamma_i(u, v)."""
    k = dist.anchor(i)
    out = set()
    for gamma in dist.levels[i]:
        if gamma[0] == u and gamma[k] == v and classify_complete(dist.tree, dist.graph, gamma):
            out.add(gamma[: k + 1])
    return out


def check_embedding_twist_bijection(dist: ExactDistribution, i: int, u: int, v: int) -> TwistBijection:
    """The embedding twist maps the complete restrictions for (v, u) onto
    those for (u, v), preserving P(phi^{a(i+1)} = .)."""
    k = dist.anchor(i)
    src = complete_restrictions(dist, i, v, u)
    dst = complete_restrictions(dist, i, u, v)
    image = {twist_embedding(gm) for gm in src}
    law = dist.levels[k]
    equal = all(law.get(gm) == law.get(twist_embedding(gm)) for gm in src)
    return TwistBijection(len(src), image == dst and len(image) == len(src), equal)


# -- Jensen error identity --------------------------------------------------


class JensenIdentity(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def jensen_error_identity(degrees: Sequence[int], k: int) -> JensenIdentity:
    """Both sides of the Jensen error identity for f(x) = x log(x - k)."""
    if not degrees:
        raise ValueError("empty degree sequence")
    if any(di <= k for di in degrees):
        raise ValueError("every degree must exceed k")
    n = len(degrees)
    d = Fraction(sum(degrees), n)
    lhs = math.fsum(float(Fraction(di, n) / d) * math.log(di - k) for di in degrees) - math.log(d - k)
    scale = float(d / (d - k))
    terms = []
    for di in degrees:
        c = Fraction(di) / d
        terms.append(float(c) * math.log(float((c * d - k) / (d - k))) - float(c - 1) * scale)
    rhs = math.fsum(terms) / n
    return JensenIdentity(lhs, rhs, lhs - rhs)


# -- Sigma terms ------------------------------------------------------------


def l_over_c(c, d, i):
    """(1/c)[c log((cd - i)/(d - i)) - (c - 1) d/(d - i)]; numpy-aware."""
    c = np.asarray(c, dtype=float)
    d = float(d)
    val = np.log1p(d * (c - 1.0) / (d - i)) - (c - 1.0) / c * (d / (d - i))
    return val if val.ndim else float(val)


class SigmaTriple(NamedTuple):
    s1: float
    s2: float
    s3: float
    inputs: dict

    @property
    def total(self) -> float:
        return self.s1 + self.s2 - self.s3


def sigma_terms(c_u, c_v, d, t: int, i: int, deg_u, deg_v) -> SigmaTriple:
    """The three per-(u, v, i) weights, evaluated as written."""
    if not (c_u * d > i and c_v * d > i):
        raise ValueError("need c_u d > i and c_v d > i")
    if deg_u <= 0 or deg_v <= 0:
        raise ValueError("degrees must be positive")
    d_f = float(d)
    s1 = (l_over_c(float(c_v), d_f, i) + l_over_c(float(c_u), d_f, i)) / 8
    s2 = min(1 / deg_u, 1 / deg_v) / (8 * t)
    s3 = 8 * t * t / d_f * (abs(math.log(deg_u / deg_v)) + 8 * t / d_f)
    inputs = {"c_u": str(c_u), "c_v": str(c_v), "d": str(d), "t": t, "i": i,
              "deg_u": str(deg_u), "deg_v": str(deg_v)}
    return SigmaTriple(float(s1), float(s2), float(s3), inputs)


@dataclass(frozen=True)
class GridSpec:
    lo: float = 0.25
    hi: float = 1e9
    per_decade: int = 1000

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        kind, _, body = text.partition(":")
        if kind.strip() != "geom":
            raise ValueError(f"unknown grid kind {kind!r}")
        vals = {}
        for item in filter(None, body.split(",")):
            key, _, val = item.partition("=")
            vals[key.strip()] = val.strip()
        try:
            spec = cls(float(vals.pop("lo", cls.lo)), float(vals.pop("hi", cls.hi)),
                       int(vals.pop("per_decade", cls.per_decade)))
        except ValueError as exc:
            raise ValueError(f"bad grid spec {text!r}") from exc
        if vals:
            raise ValueError(f"unknown grid keys {sorted(vals)}")
        if not (0 < spec.lo < spec.hi) or spec.per_decade < 1:
            raise ValueError(f"empty grid {text!r}")
        return spec

    def __str__(self) -> str:
        return f"geom:lo={self.lo:g},hi={self.hi:g},per_decade={self.per_decade}"

    def points(self, extra: Sequence[float] = ()) -> np.ndarray:
        count = int(math.ceil(math.log10(self.hi / self.lo) * self.per_decade)) + 1
        pts = np.geomspace(self.lo, self.hi, count)
        extra = [x for x in extra if self.lo <= x <= self.hi]
        return np.unique(np.concatenate([pts, np.asarray(extra, dtype=float)]))


@dataclass
class MonotonicityReport:
    d: float
    i: int
    points: int
    non_negative: bool
    increasing_above_one: bool
    decreasing_below_one: bool | None  # None when d is below the threshold
    negative_below_range: int  # grid points with c < i/(d-i) where L/c < 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def check_l_monotonicity(d, i: int, grid: Sequence[float] | np.ndarray, decrease_threshold=None,
                         tol: float = 1e-12) -> MonotonicityReport:
    """Sign and monotonicity of L(c)/c on a grid of c values."""
    d = float(d)
    c = np.sort(np.asarray(grid, dtype=float))
    c = c[c * d > i]
    vals = l_over_c(c, d, i)
    lower = i / (d - i)
    in_range = c >= lower
    up = c >= 1
    down = in_range & (c <= 1)
    increasing = bool(np.all(np.diff(vals[up]) > 0)) if up.sum() > 1 else True
    threshold = 2 * i if decrease_threshold is None else decrease_threshold
    decreasing = None
    if d > threshold:
        decreasing = bool(np.all(np.diff(vals[down]) < 0)) if down.sum() > 1 else True
    return MonotonicityReport(
        d, i, int(c.size),
        bool(np.all(vals[in_range] >= -tol)),
        increasing, decreasing,
        int(np.sum(vals[~in_range] < 0)),
    )


# -- empirical d_0 ----------------------------------------------------------


def regime_epsilon(t: int) -> float:
    """Half-width of the band around c = 1 that separates the three cases."""
    return 1.0 / (2**8 * t**3)


class RegimeMin(NamedTuple):
    value: float
    c_u: float
    c_v: float
    i: int


def _min_over_pairs(c: np.ndarray, d: float, t: int, i: int, v_mask: np.ndarray, u_cap: int | None = None):
    """min of Sigma^1 + Sigma^2 - Sigma^3 over grid pairs c_u <= c_v with
    c_v restricted by ``v_mask`` and c_u to indices < ``u_cap``.

    With c_v the larger value the objective splits into a term in c_u and a
    term in c_v, so a prefix minimum over c_u replaces the double loop.
    """
    a = l_over_c(c, d, i) / 8
    logc = np.log(c)
    k3 = 8 * t * t / d
    q = a + k3 * logc
    p = a + 1.0 / (8 * t * d * c) - k3 * logc
    if u_cap is not None:
        q = np.where(np.arange(c.size) < u_cap, q, np.inf)
    pref = np.minimum.accumulate(q)
    idx = np.arange(c.size)
    arg = np.maximum.accumulate(np.where(q == pref, idx, 0))
    total = np.where(v_mask, p + pref, np.inf) - 64 * t**3 / d**2
    j = int(np.argmin(total))
    if not np.isfinite(total[j]):
        return None
    return RegimeMin(float(total[j]), float(c[arg[j]]), float(c[j]), i)


def sigma_minimum(t: int, d: float, grid: GridSpec) -> dict[str, RegimeMin | None]:
    """Per-regime minimum of Sigma^1 + Sigma^2 - Sigma^3 over the c-grid,
    all i in 1..t-1, with deg = c d."""
    eps = regime_epsilon(t)
    c = grid.points(extra=(1.0, 1 + eps, 1 / (1 + eps)))
    c = c[c * d > t - 1]
    out: dict[str, RegimeMin | None] = {"case1": None, "case2": None, "case3": None}
    inner = (c > 1 / (1 + eps)) & (c < 1 + eps)
    # case 2 with c_v < 1+eps needs c_u <= 1/(1+eps)
    u_cap_low = int(np.searchsorted(c, 1 / (1 + eps), side="right"))
    for i in range(1, t):
        cand = {
            "case1": _case1(c, d, t, i, inner),
            "case2": _best(
                _min_over_pairs(c, d, t, i, (c >= 1 + eps) & (c <= d)),
                _min_over_pairs(c, d, t, i, c < 1 + eps, u_cap=u_cap_low),
            ),
            "case3": _min_over_pairs(c, d, t, i, c > d),
        }
        for key, val in cand.items():
            out[key] = _best(out[key], val)
    return out


def _case1(c, d, t, i, inner):
    # both values strictly inside (1/(1+eps), 1+eps)
    idx = np.flatnonzero(inner)
    if idx.size == 0:
        return None
    sub = c[idx]
    return _min_over_pairs(sub, d, t, i, np.ones(sub.size, dtype=bool))


def _best(a: RegimeMin | None, b: RegimeMin | None) -> RegimeMin | None:
    if a is None:
        return b
    if b is None:
        return a
    return a if a.value <= b.value else b


def sigma_nonnegative(t: int, d: float, grid: GridSpec) -> bool:
    mins = sigma_minimum(t, d, grid)
    return all(m is None or m.value >= 0 for m in mins.values())


@dataclass
class D0Result:
    t: int
    d0: int
    grid: str
    ratio_t4: float
    below_fails: bool
    regime_minima: dict[str, RegimeMin | None]
    case3_covered: bool

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "d0": self.d0,
            "grid": self.grid,
            "d0_over_t4": self.ratio_t4,
            "below_fails": self.below_fails,
            "case3_covered": self.case3_covered,
            "regime_minima": {
                k: None if m is None else m._asdict() for k, m in self.regime_minima.items()
            },
        }


def empirical_d0(t: int, grid: GridSpec | str | None = None) -> D0Result:
    """Smallest integer d with Sigma^1 + Sigma^2 - Sigma^3 >= 0 at every grid
    point (c_u, c_v) and every i < t, found by doubling then bisection."""
    if t < 2:
        raise ValueError("t must be at least 2")
    grid = GridSpec.parse(grid) if isinstance(grid, str) else (grid or GridSpec())
    lo = int(math.floor((t - 1) / grid.lo)) + 1  # smallest d with lo*d > t-1
    if sigma_nonnegative(t, lo, grid):
        d0 = lo
    else:
        hi = max(2 * lo, 2)
        while not sigma_nonnegative(t, hi, grid):
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if sigma_nonnegative(t, mid, grid):
                hi = mid
            else:
                lo = mid
        d0 = hi
    below = d0 - 1
    below_fails = below * grid.lo <= t - 1 or not sigma_nonnegative(t, below, grid)
    return D0Result(t, d0, str(grid), d0 / t**4, below_fails, sigma_minimum(t, d0, grid), grid.hi > d0)
