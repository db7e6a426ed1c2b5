"""Exact cut arithmetic.

Sizes, expected sizes, excesses, multicolour probabilities, average
excesses of partial cuts, and the closed-form excess bounds.  Every
probability and expectation is an exact ``fractions.Fraction`` with a
big-integer numerator; floats appear only at the reporting boundary.
For 2-cuts all values are dyadic (power-of-two denominators), which the
derandomization engines exploit.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core import Hypergraph, Multigraph, WeightedGraph, multigraph_as_hypergraph
from .errors import InvalidCut, InvalidParams


@dataclass(frozen=True)
class Cut:
    """Assignment of every vertex to a part in {1..r}."""

    r: int
    assignment: tuple[int, ...]

    def __post_init__(self):
        if self.r < 2:
            raise InvalidCut(f"need at least 2 parts, got r={self.r}")
        if any(p < 1 or p > self.r for p in self.assignment):
            raise InvalidCut("part labels must lie in {1..r}")

    def parts(self) -> list[set[int]]:
        out: list[set[int]] = [set() for _ in range(self.r)]
        for v, p in enumerate(self.assignment):
            out[p - 1].add(v)
        return out


@dataclass(frozen=True)
class PartialCut:
    """Assignment of parts to a subset of the vertices."""

    r: int
    assigned: dict  # vertex -> part in {1..r}

    def __post_init__(self):
        if any(p < 1 or p > self.r for p in self.assigned.values()):
            raise InvalidCut("part labels must lie in {1..r}")

    @property
    def domain(self) -> set[int]:
        return set(self.assigned)


@dataclass(frozen=True)
class CutMetrics:
    size: Fraction  # integral for unweighted instances
    expected: Fraction
    excess: Fraction


def is_dyadic(x: Fraction) -> bool:
    d = x.denominator
    return d & (d - 1) == 0


def dyadic_log2_denominator(x: Fraction) -> int:
    if not is_dyadic(x):
        raise InvalidParams(f"{x} is not dyadic")
    return x.denominator.bit_length() - 1


@lru_cache(maxsize=None)
def stirling2(k: int, r: int) -> int:
    """Number of unlabelled partitions of a k-set into r nonempty sets."""
    if k == 0 and r == 0:
        return 1
    if k == 0 or r == 0 or r > k:
        return 0
    return r * stirling2(k - 1, r) + stirling2(k - 1, r - 1)


def expected_fraction(k: int, r: int) -> Fraction:
    """Probability a size-k edge is multicoloured under a uniform r-cut."""
    if r < 2 or r > k:
        raise InvalidParams(f"expected_fraction needs 2 <= r <= k, got k={k}, r={r}")
    return Fraction(stirling2(k, r) * math.factorial(r), r**k)


@lru_cache(maxsize=None)
def _inclusion_exclusion(missing: int, free_count: int, base: int) -> Fraction:
    """Pr(free_count uniform-over-base vertices hit all ``missing`` parts)."""
    total = Fraction(0)
    for j in range(missing + 1):
        term = Fraction((base - j) ** free_count, base**free_count)
        total += (-1) ** j * math.comb(missing, j) * term
    return total


def multicolour_probability(
    edge_size: int,
    hit_parts,
    free_count: int,
    r: int,
    free_parts: int | None = None,
) -> Fraction:
    """Probability all r parts get hit, by inclusion-exclusion.

    ``hit_parts`` are parts already known to be hit by determined
    vertices; ``free_count`` vertices are still uniform.  When
    ``free_parts`` is given, free vertices are uniform over {1..free_parts}
    only (partial-exposure bookkeeping); parts above ``free_parts`` must
    then already be hit for the probability to be nonzero.
    """
    hit = set(hit_parts)
    if free_count < 0 or any(p < 1 or p > r for p in hit):
        raise InvalidParams("inconsistent multicolour bookkeeping")
    if len(hit) + free_count > edge_size:
        raise InvalidParams(
            f"edge of size {edge_size} cannot have {len(hit)} hit parts and {free_count} free vertices"
        )
    base = r if free_parts is None else free_parts
    missing = [p for p in range(1, r + 1) if p not in hit]
    if any(p > base for p in missing):
        return Fraction(0)
    return _inclusion_exclusion(len(missing), free_count, base)


def _edge_probability_under_partial(edge, pc: PartialCut, free_parts: int | None = None) -> Fraction:
    hit = {pc.assigned[v] for v in edge if v in pc.assigned}
    free = sum(1 for v in edge if v not in pc.assigned)
    return multicolour_probability(len(edge), hit, free, pc.r, free_parts=free_parts)


def _edge_probability_key(edge, assigned: dict, r: int, base: int):
    """(missing-part count, free count) term key, or None for probability 0."""
    hit = set()
    free = 0
    for v in edge:
        p = assigned.get(v)
        if p is None:
            free += 1
        else:
            hit.add(p)
    missing = r - len(hit)
    if any(p > base for p in range(1, r + 1) if p not in hit):
        return None
    return missing, free


def _as_hypergraph(h) -> Hypergraph:
    if isinstance(h, Multigraph):
        return multigraph_as_hypergraph(h)
    return h


def uniform_expected_size(h, r: int) -> Fraction:
    """Exact expected size of a uniformly random r-cut."""
    hh = _as_hypergraph(h)
    sizes = Counter(len(e) for e in hh.edges)
    return sum(
        (cnt * _inclusion_exclusion(r, s, r) for s, cnt in sizes.items()),
        Fraction(0),
    )


def cut_metrics(h, c: Cut) -> CutMetrics:
    """Size, exact expected size, and excess of a cut of h.

    Accepts a Hypergraph or a Multigraph.  Edges smaller than r
    contribute probability 0 to the expectation, so mixed instances are
    handled exactly.
    """
    hh = _as_hypergraph(h)
    if len(c.assignment) != hh.n_vertices:
        raise InvalidCut(
            f"assignment length {len(c.assignment)} != n_vertices {hh.n_vertices}"
        )
    size = 0
    full = frozenset(range(1, c.r + 1))
    assign = c.assignment
    for e in hh.edges:
        if {assign[v] for v in e} == full:
            size += 1
    expected = uniform_expected_size(hh, c.r)
    return CutMetrics(Fraction(size), expected, size - expected)


def weighted_cut_metrics(g: WeightedGraph, c: Cut) -> CutMetrics:
    """Cut metrics for a weighted graph under a 2-cut.

    Size is the crossing weight; the uniform-cut expectation is half the
    total weight.
    """
    if c.r != 2:
        raise InvalidCut("weighted instances carry pair edges; use r=2")
    if len(c.assignment) != g.n_vertices:
        raise InvalidCut("assignment length mismatch")
    size = Fraction(0)
    for u, v, w in g.weights:
        if c.assignment[u] != c.assignment[v]:
            size += w
    expected = g.total_weight / 2
    return CutMetrics(size, expected, size - expected)


def partial_average_size(h, pc: PartialCut, free_parts: int | None = None) -> Fraction:
    """Expected cut size after completing ``pc`` uniformly at random.

    ``free_parts`` restricts the uniform completion to parts
    {1..free_parts} (used by partial-exposure reductions); by default the
    completion is uniform over all r parts.
    """
    hh = _as_hypergraph(h)
    base = pc.r if free_parts is None else free_parts
    terms: Counter = Counter()
    for e in hh.edges:
        key = _edge_probability_key(e, pc.assigned, pc.r, base)
        if key is not None:
            terms[key] += 1
    return sum(
        (cnt * _inclusion_exclusion(missing, free, base) for (missing, free), cnt in terms.items()),
        Fraction(0),
    )


def partial_average_excess(h, pc: PartialCut, free_parts: int | None = None) -> Fraction:
    """Average size of the partial cut minus the uniform-cut expectation.

    Only edges meeting the assigned domain can shift the average, so the
    sum runs over those alone.
    """
    hh = _as_hypergraph(h)
    base = pc.r if free_parts is None else free_parts
    assigned = pc.assigned
    cond: Counter = Counter()
    uncond: Counter = Counter()
    for e in hh.edges:
        if free_parts is None and not any(v in assigned for v in e):
            continue  # untouched edges keep their unconditional probability
        key = _edge_probability_key(e, assigned, pc.r, base)
        if key is not None:
            cond[key] += 1
        uncond[len(e)] += 1
    total = sum(
        (cnt * _inclusion_exclusion(missing, free, base) for (missing, free), cnt in cond.items()),
        Fraction(0),
    )
    baseline = sum(
        (cnt * _inclusion_exclusion(pc.r, s, pc.r) for s, cnt in uncond.items()),
        Fraction(0),
    )
    return total - baseline


def _sqrt_bound(radicand: int, shift: int, denom: int):
    """Exact (sqrt(radicand)-shift)/denom when a perfect square, else float."""
    root = math.isqrt(radicand)
    if root * root == radicand:
        return Fraction(root - shift, denom)
    return (math.sqrt(radicand) - shift) / denom


#: bound id -> (required params, computation, one-line claim)
_BOUNDS = {
    "graph-2cut-m": (
        ("m",),
        lambda p: _sqrt_bound(8 * p["m"] + 1, 1, 8),
        "every m-edge multigraph has a 2-cut with excess >= (sqrt(8m+1)-1)/8",
    ),
    "connected-graph": (
        ("n",),
        lambda p: Fraction(p["n"] - 1, 4),
        "every connected n-vertex graph has a 2-cut with excess >= (n-1)/4",
    ),
    "nonisolated-graph": (
        ("n",),
        lambda p: Fraction(p["n"], 6),
        "every graph without isolated vertices has a 2-cut with excess >= n/6",
    ),
    "sts-2cut": (
        ("m",),
        lambda p: _sqrt_bound(24 * p["m"] + 1, 1, 16),
        "every m-edge 3-graph has a 2-cut with excess >= (sqrt(24m+1)-1)/16",
    ),
    "connected-3graph": (
        ("n",),
        lambda p: Fraction(p["n"] - 1, 8),
        "every connected n-vertex 3-graph has a 2-cut with excess >= (n-1)/8",
    ),
    "nonisolated-3graph": (
        ("n",),
        lambda p: Fraction(p["n"], 12),
        "every 3-graph without isolated vertices has a 2-cut with excess >= n/12",
    ),
    "mixed-2cut-n": (
        ("k", "n"),
        lambda p: Fraction(p["n"], p["k"] * 2 ** (p["k"] - 1)),
        "a mixed k-multigraph with n vertices in edges of size >= 3 has a 2-cut with excess >= n/(k*2^(k-1))",
    ),
    "mixed-k-edges": (
        ("k", "n"),
        lambda p: Fraction(p["n"], p["k"] * 2 ** p["k"]),
        "a mixed k-multigraph with n vertices in size-k edges has a 2-cut with excess >= n/(k*2^k)",
    ),
}


def theorem_bound(name: str, **params):
    """Guaranteed excess value for a named closed-form bound.

    Returns an exact Fraction when the formula is rational for the given
    parameters (all square roots resolve), otherwise a float.
    """
    if name not in _BOUNDS:
        raise InvalidParams(f"unknown bound id {name!r}; known: {sorted(_BOUNDS)}")
    required, fn, _claim = _BOUNDS[name]
    missing = [q for q in required if q not in params]
    if missing:
        raise InvalidParams(f"bound {name!r} needs params {required}, missing {missing}")
    return fn(params)


def theorem_bound_claim(name: str) -> str:
    if name not in _BOUNDS:
        raise InvalidParams(f"unknown bound id {name!r}")
    return _BOUNDS[name][2]


def known_bounds() -> list[str]:
    return sorted(_BOUNDS)


def equitable_complete_value(n: int, k: int, r: int) -> int:
    """Multicoloured-edge count of the equitable r-cut of the complete k-graph.

    Part sizes differ by at most one; the count sums, over all positive
    compositions (s_1..s_r) of k, the products of binomials C(n_i, s_i).
    """
    if not (2 <= r <= k <= n):
        raise InvalidParams(f"need 2 <= r <= k <= n, got n={n}, k={k}, r={r}")
    sizes = [n // r + (1 if i < n % r else 0) for i in range(r)]

    def rec(i: int, remaining: int) -> int:
        if i == r - 1:
            return math.comb(sizes[i], remaining) if remaining >= 1 else 0
        total = 0
        for s in range(1, remaining - (r - 1 - i) + 1):
            c = math.comb(sizes[i], s)
            if c:
                total += c * rec(i + 1, remaining - s)
        return total

    return rec(0, k)
