"""Immutable mixed multihypergraph data model.

Vertices are dense 0-based integers.  Edges are stored as strictly
increasing tuples; coincident edges are kept as distinct entries, so
multiplicity is a first-class concept.  Instances never mutate after
construction and every operation here is pure.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidEdge, InvalidParams, InvalidVertex

Edge = tuple[int, ...]


@dataclass(frozen=True)
class Hypergraph:
    """A mixed k-multihypergraph: edge sizes <= max_arity, repeats allowed."""

    n_vertices: int
    max_arity: int
    edges: tuple[Edge, ...]

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_multiset(self) -> Counter:
        return Counter(self.edges)

    def incidence(self) -> list[list[int]]:
        """Per-vertex list of incident edge indices."""
        inc: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for i, e in enumerate(self.edges):
            for v in e:
                inc[v].append(i)
        return inc

    def vertices_in_edges_of_size_at_least(self, s: int) -> set[int]:
        out: set[int] = set()
        for e in self.edges:
            if len(e) >= s:
                out.update(e)
        return out

    def without_edges(self, drop: set[int]) -> "Hypergraph":
        """Copy with the edges at the given indices removed."""
        kept = tuple(e for i, e in enumerate(self.edges) if i not in drop)
        return Hypergraph(self.n_vertices, self.max_arity, kept)


@dataclass(frozen=True)
class Multigraph:
    """Multiset of unordered vertex pairs with integer multiplicities."""

    n_vertices: int
    pairs: tuple[tuple[int, int, int], ...]  # (u, v, multiplicity), u < v

    @property
    def m(self) -> int:
        return sum(mult for _, _, mult in self.pairs)

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per-vertex list of (neighbour, multiplicity)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_vertices)]
        for u, v, mult in self.pairs:
            adj[u].append((v, mult))
            adj[v].append((u, mult))
        return adj


@dataclass(frozen=True)
class WeightedGraph:
    """Symmetric nonnegative rational edge weights over vertex pairs."""

    n_vertices: int
    weights: tuple[tuple[int, int, Fraction], ...]  # (u, v, weight), u < v

    @property
    def total_weight(self) -> Fraction:
        return sum((w for _, _, w in self.weights), Fraction(0))

    def adjacency(self) -> list[list[tuple[int, Fraction]]]:
        adj: list[list[tuple[int, Fraction]]] = [[] for _ in range(self.n_vertices)]
        for u, v, w in self.weights:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj


@dataclass(frozen=True)
class DegreeProfile:
    degree: tuple[int, ...]
    codegree: dict[tuple[int, int], int] = field(compare=False)
    max_degree: int = 0

    def codeg(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return self.codegree.get((u, v), 0)


def build(n: int, raw_edges, max_arity: int | None = None) -> Hypergraph:
    """Validate and canonicalize raw edge lists into a Hypergraph.

    Duplicate edges are preserved as multiplicity.  ``max_arity`` may
    declare a bound larger than any realized edge size (mixed semantics);
    by default it is the largest realized size.
    """
    if n < 0:
        raise InvalidParams(f"negative vertex count {n}")
    edges: list[Edge] = []
    realized = 0
    for raw in raw_edges:
        e = tuple(sorted(raw))
        if len(e) == 0:
            raise InvalidEdge("empty edge")
        if any(e[i] == e[i + 1] for i in range(len(e) - 1)):
            raise InvalidEdge(f"repeated vertex inside edge {raw!r}")
        if e[0] < 0 or e[-1] >= n:
            raise InvalidVertex(f"vertex id out of range in edge {raw!r} (n={n})")
        realized = max(realized, len(e))
        edges.append(e)
    k = realized if max_arity is None else max_arity
    if k < realized:
        raise InvalidEdge(f"declared max_arity {k} below realized edge size {realized}")
    return Hypergraph(n, k, tuple(edges))


def degree_profile(h: Hypergraph) -> DegreeProfile:
    """Exact per-vertex degrees and per-pair joint degrees (codegrees)."""
    deg = [0] * h.n_vertices
    codeg: Counter = Counter()
    for e in h.edges:
        for v in e:
            deg[v] += 1
        for i in range(len(e)):
            for j in range(i + 1, len(e)):
                codeg[(e[i], e[j])] += 1
    return DegreeProfile(tuple(deg), dict(codeg), max(deg, default=0))


def induce(h: Hypergraph, u_set, min_inside: int | None = None, mode: str = "restrict") -> Hypergraph:
    """Sub-multihypergraph of edges meeting ``u_set`` in >= min_inside vertices.

    ``min_inside=None`` keeps only edges fully inside ``u_set`` (the induced
    subgraph H[U]).  ``mode="restrict"`` replaces each kept edge by its
    intersection with U (empty intersections are dropped); ``mode="keep"``
    retains full edges.  Vertex ids are preserved; the result lives on the
    same [0, n) id space.
    """
    if mode not in ("restrict", "keep"):
        raise ValueError(f"unknown induce mode {mode!r}")
    u = frozenset(u_set)
    kept: list[Edge] = []
    for e in h.edges:
        inside = tuple(v for v in e if v in u)
        need = len(e) if min_inside is None else min_inside
        if len(inside) < need:
            continue
        out = inside if mode == "restrict" else e
        if out:
            kept.append(out)
    return Hypergraph(h.n_vertices, h.max_arity, tuple(kept))


def clique_expand(h: Hypergraph) -> Multigraph:
    """Replace each size-s edge by its s-clique of pairs; multiplicities add."""
    counts: Counter = Counter()
    for e in h.edges:
        for i in range(len(e)):
            for j in range(i + 1, len(e)):
                counts[(e[i], e[j])] += 1
    pairs = tuple((u, v, mult) for (u, v), mult in sorted(counts.items()))
    return Multigraph(h.n_vertices, pairs)


def multigraph_from_pairs(n: int, pair_list) -> Multigraph:
    """Multigraph from an iterable of (u, v) pairs; repeats add multiplicity."""
    counts: Counter = Counter()
    for u, v in pair_list:
        if u == v:
            raise InvalidEdge(f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidVertex(f"pair ({u},{v}) out of range (n={n})")
        if u > v:
            u, v = v, u
        counts[(u, v)] += 1
    return Multigraph(n, tuple((u, v, c) for (u, v), c in sorted(counts.items())))


def induce_multigraph(g: Multigraph, u_set) -> Multigraph:
    u = frozenset(u_set)
    pairs = tuple(p for p in g.pairs if p[0] in u and p[1] in u)
    return Multigraph(g.n_vertices, pairs)


def multigraph_as_hypergraph(g: Multigraph) -> Hypergraph:
    """View a multigraph as a 2-uniform multihypergraph (pairs repeated)."""
    edges: list[Edge] = []
    for u, v, mult in g.pairs:
        edges.extend([(u, v)] * mult)
    return Hypergraph(g.n_vertices, 2, tuple(edges))
