"""Deterministic cut engines.

Conditional expectations with deferred (undetermined) vertices, greedy
cuts over vertex orderings, flip local search, and derandomized
combination of per-part partial cuts.  All 2-cut conditional
expectations have denominators dividing 2^(k-1), so the engines carry
them as integers scaled by that power of two; the arithmetic stays
exact.  Each engine cross-checks its own bookkeeping and raises
``GuaranteeViolation`` / ``CertificateError`` on any mismatch.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .core import Hypergraph, Multigraph, WeightedGraph, multigraph_as_hypergraph
from .cutspace import (
    Cut,
    PartialCut,
    multicolour_probability,
    partial_average_excess,
    uniform_expected_size,
)
from .errors import (
    CertificateError,
    GuaranteeViolation,
    InvalidCut,
    InvalidParams,
    PlanInvalid,
    SearchFailed,
)


@dataclass(frozen=True)
class EsLedger:
    """Per-run record of the deferred conditional-expectations engine."""

    order: tuple[int, ...]
    determined_at_own_step: tuple[int, ...]
    deferred_counts: tuple[int, ...]  # |U_v| per step, aligned with order
    w_set: frozenset
    guaranteed_excess: Fraction
    realized_excess: Fraction
    expectation_trace: tuple[Fraction, ...]  # E Z_1 .. E Z_{n+1}


@dataclass(frozen=True)
class GreedyLedger:
    order: tuple[int, ...]
    back_degrees: tuple
    gains: tuple
    realized_excess: Fraction


@dataclass(frozen=True)
class CombinePlan:
    parts: tuple
    partial_cuts: tuple
    average_excesses: tuple
    swaps: tuple  # 0 = identity, 1 = transposition, per listed part
    realized_excess: Fraction


def _two_cut_prob_scaled(c1: int, c2: int, f: int, scale: int) -> int:
    """Pr(both parts hit) * scale, given per-side determined counts and f free."""
    if c1 > 0 and c2 > 0:
        return scale
    if c1 > 0 or c2 > 0:
        return scale - (scale >> f)
    if f <= 1:
        return 0
    return scale - (scale >> (f - 1))


def first_two_vertex_set(h: Hypergraph, order) -> frozenset:
    """Vertices among the first two, in the order, of some edge of size >= 3."""
    pos = {v: i for i, v in enumerate(order)}
    w: set[int] = set()
    for e in h.edges:
        if len(e) >= 3:
            w.update(sorted(e, key=pos.__getitem__)[:2])
    return frozenset(w)


def erdos_selfridge_2cut(h: Hypergraph, order, on_step=None) -> tuple[Cut, EsLedger]:
    """Conditional-expectations 2-cut with deferred vertices.

    Processes vertices in the given order.  A vertex whose every joint
    assignment with the pending deferred vertices leaves the conditional
    expectation unchanged stays deferred; otherwise the maximizing
    assignment is applied to the vertex together with every deferred
    vertex sharing an uncertain edge with it.  Leftover deferred vertices
    go to part 1.  Ties prefer part 1, deciding the current vertex first
    and then its deferred partners in ascending id order.

    The realized excess provably meets (|D| + sum |U_v|) / 2^k, which is
    at least |W|/2^k for the first-two vertex set W of the order.

    ``on_step(v, assigned, expectation)`` is called after each step with
    the vertex just processed, a copy of the determined assignments, and
    the exact conditional expectation at that point (v=None before the
    first step).
    """
    n = h.n_vertices
    if sorted(order) != list(range(n)):
        raise InvalidParams("order must be a permutation of all vertices")
    k_eff = max((len(e) for e in h.edges), default=2)
    k_eff = max(k_eff, 2)
    scale = 1 << (k_eff - 1)

    edges = h.edges
    inc = h.incidence()
    cnt1 = [0] * len(edges)
    cnt2 = [0] * len(edges)
    free = [len(e) for e in edges]
    prob = [_two_cut_prob_scaled(0, 0, f, scale) for f in free]

    part = [0] * n  # 0 = unassigned
    deferred: set[int] = set()
    ez = sum(prob)
    trace = [ez]
    determined: list[int] = []
    deferred_counts: list[int] = []

    def snapshot(v):
        if on_step is not None:
            assigned = {w: p for w, p in enumerate(part) if p}
            on_step(v, assigned, Fraction(ez, scale))

    def uncertain(ei: int) -> bool:
        return 0 < prob[ei] < scale

    def hypothetical(ei: int, extra: dict) -> int:
        c1, c2, f = cnt1[ei], cnt2[ei], free[ei]
        for p in extra.values():
            if p == 1:
                c1 += 1
            else:
                c2 += 1
            f -= 1
        return _two_cut_prob_scaled(c1, c2, f, scale)

    def assign(w: int, p: int) -> None:
        nonlocal ez
        part[w] = p
        for ei in inc[w]:
            ez -= prob[ei]
            if p == 1:
                cnt1[ei] += 1
            else:
                cnt2[ei] += 1
            free[ei] -= 1
            prob[ei] = _two_cut_prob_scaled(cnt1[ei], cnt2[ei], free[ei], scale)
            ez += prob[ei]

    snapshot(None)
    for v in order:
        unc_v = [ei for ei in inc[v] if uncertain(ei)]
        u_v: set[int] = set()
        for ei in unc_v:
            partners = [u for u in edges[ei] if u in deferred]
            if len(partners) > 1:
                raise CertificateError("uncertain edge touches two deferred vertices")
            u_v.update(partners)
        unc_u = {u: [ei for ei in inc[u] if uncertain(ei)] for u in u_v}
        solo_v = [ei for ei in unc_v if not any(u in deferred for u in edges[ei])]

        best_delta = None
        best_cv = 1
        best_cu: dict[int, int] = {}
        for cv in (1, 2):
            delta = sum(hypothetical(ei, {v: cv}) - prob[ei] for ei in solo_v)
            choice: dict[int, int] = {}
            for u in sorted(u_v):
                best_u = None
                for cu in (1, 2):
                    d = 0
                    for ei in unc_u[u]:
                        extra = {u: cu}
                        if v in edges[ei]:
                            extra[v] = cv
                        d += hypothetical(ei, extra) - prob[ei]
                    if best_u is None or d > best_u[0]:
                        best_u = (d, cu)
                delta += best_u[0]
                choice[u] = best_u[1]
            if best_delta is None or delta > best_delta:
                best_delta, best_cv, best_cu = delta, cv, choice

        if best_delta < 0:
            raise CertificateError("maximal conditional expectation fell below the average")
        if best_delta < len(u_v):  # scaled units: |U_v| / 2^(k-1)
            raise CertificateError("step gain fell below the deferred-partner bound")
        if best_delta == 0:
            if u_v:
                raise CertificateError("zero-gain step with nonempty deferred neighbourhood")
            deferred.add(v)
            deferred_counts.append(0)
        else:
            deferred_counts.append(len(u_v))
            determined.append(v)
            before = ez
            assign(v, best_cv)
            for u in sorted(u_v):
                assign(u, best_cu[u])
                deferred.remove(u)
            if ez != before + best_delta:
                raise CertificateError("factorized maximum disagrees with applied update")
        trace.append(ez)
        snapshot(v)

    for w in list(deferred):
        part[w] = 1

    cut = Cut(2, tuple(part))
    realized = sum(1 for e in edges if len({part[v] for v in e}) == 2)
    if realized * scale != ez:
        raise CertificateError("realized size differs from final conditional expectation")

    w_set = first_two_vertex_set(h, order)
    credit = len(determined) + sum(deferred_counts)
    if credit < len(w_set):
        raise GuaranteeViolation("determined-vertex credit fell below |W|")
    guaranteed = Fraction(credit, 2**k_eff)
    realized_excess = Fraction(realized * scale - trace[0], scale)
    if realized_excess < guaranteed:
        raise GuaranteeViolation(
            f"realized excess {realized_excess} below guarantee {guaranteed}"
        )
    ledger = EsLedger(
        order=tuple(order),
        determined_at_own_step=tuple(determined),
        deferred_counts=tuple(deferred_counts),
        w_set=w_set,
        guaranteed_excess=guaranteed,
        realized_excess=realized_excess,
        expectation_trace=tuple(Fraction(t, scale) for t in trace),
    )
    return cut, ledger


def order_for_W(h: Hypergraph, trials: int, seed) -> list[int]:
    """Best of ``trials`` random orders by |W|, retried until |W| >= 2n'/k.

    n' counts vertices lying in edges of size >= 3; the threshold is
    guaranteed reachable because a uniformly random order meets it in
    expectation.
    """
    if trials < 1:
        raise InvalidParams("trials must be >= 1")
    rng = random.Random(f"order-w:{seed}")
    n_prime = len(h.vertices_in_edges_of_size_at_least(3))
    k_eff = max((len(e) for e in h.edges), default=2)
    best_order: list[int] = list(range(h.n_vertices))
    best_w = len(first_two_vertex_set(h, best_order))
    attempts = 0
    cap = max(1000, 200 * trials)
    while True:
        attempts += 1
        cand = list(range(h.n_vertices))
        rng.shuffle(cand)
        w = len(first_two_vertex_set(h, cand))
        if w > best_w:
            best_w, best_order = w, cand
        if attempts >= trials and best_w * k_eff >= 2 * n_prime:
            return best_order
        if attempts >= cap:
            raise SearchFailed("order search exhausted its cap", best=best_order)


def _pair_adjacency(g):
    if isinstance(g, (Multigraph, WeightedGraph)):
        return g.adjacency(), g.n_vertices
    raise InvalidParams(f"expected Multigraph or WeightedGraph, got {type(g).__name__}")


def greedy_on_adjacency(adj: dict, order) -> tuple[dict, list, list]:
    """Greedy 2-cut over an adjacency mapping restricted to ``order``.

    ``adj[v]`` lists (neighbour, weight) with neighbours inside ``order``.
    Returns (assignment, per-step back weights, per-step gains); the rule
    and tie-handling match ``greedy_order_cut``.
    """
    part: dict = {}
    backs = []
    gains = []
    for v in order:
        w1 = w2 = 0
        for nb, w in adj.get(v, ()):
            side = part.get(nb)
            if side == 1:
                w1 += w
            elif side == 2:
                w2 += w
        part[v] = 1 if w2 >= w1 else 2
        backs.append(w1 + w2)
        gains.append(Fraction(abs(w1 - w2), 2))
    return part, backs, gains


def greedy_order_cut(g, order) -> tuple[Cut, GreedyLedger]:
    """One-pass greedy 2-cut: each vertex joins the side cutting more weight.

    Ties go to part 1 (the side the first vertex lands on).  The realized
    size is exactly total/2 + sum |e_1(v) - e_2(v)|/2.
    """
    adj, n = _pair_adjacency(g)
    if sorted(order) != list(range(n)):
        raise InvalidParams("order must be a permutation of all vertices")
    assigned, backs, gains = greedy_on_adjacency(
        {v: adj[v] for v in range(n)}, list(order)
    )
    part = [assigned[v] for v in range(n)]
    cut = Cut(2, tuple(part))
    if isinstance(g, Multigraph):
        total = Fraction(g.m)
        size = Fraction(sum(mult for u, v, mult in g.pairs if part[u] != part[v]))
    else:
        total = g.total_weight
        size = sum((w for u, v, w in g.weights if part[u] != part[v]), Fraction(0))
    excess = sum(gains, Fraction(0))
    if size != total / 2 + excess:
        raise CertificateError("greedy size does not match total/2 + gains")
    ledger = GreedyLedger(tuple(order), tuple(backs), tuple(gains), excess)
    return cut, ledger


def flip_local_search(g, start: Cut) -> Cut:
    """Single-vertex flips until no flip increases the 2-cut weight.

    Terminates because the cut weight strictly increases with each flip
    and is bounded by the total weight.
    """
    adj, n = _pair_adjacency(g)
    if start.r != 2 or len(start.assignment) != n:
        raise InvalidCut("flip search needs a 2-cut on the instance's vertex set")
    part = list(start.assignment)
    improved = True
    while improved:
        improved = False
        for v in range(n):
            same = sum(w for nb, w in adj[v] if part[nb] == part[v])
            cross = sum(w for nb, w in adj[v] if part[nb] != part[v])
            if same > cross:
                part[v] = 3 - part[v]
                improved = True
    return Cut(2, tuple(part))


def combine_partial_cuts(h, parts, partial_cuts) -> tuple[Cut, CombinePlan]:
    """Merge disjoint partial 2-cuts into one cut keeping their total excess.

    Each listed part carries a partial cut on exactly its vertices;
    remaining vertices act as singleton parts.  Each part's labelling is
    kept or transposed; the swaps are chosen sequentially by exact
    conditional expectation with the undecided swaps uniform.  Requires
    every edge to spread over at least |e ∩ (union of parts)| - 1 distinct
    parts; offending edges are reported, the caller removes them first.
    """
    hh = multigraph_as_hypergraph(h) if isinstance(h, Multigraph) else h
    n = hh.n_vertices
    parts = [frozenset(p) for p in parts]
    if len(parts) != len(partial_cuts):
        raise InvalidParams("parts and partial cuts must align")
    seen: set[int] = set()
    for p, pc in zip(parts, partial_cuts):
        if p & seen:
            raise InvalidParams("parts must be disjoint")
        seen |= p
        if set(pc) != set(p):
            raise InvalidParams("each partial cut must cover exactly its part")
        if any(c not in (1, 2) for c in pc.values()):
            raise InvalidCut("partial cuts are 2-cuts")

    part_index = {}
    for i, p in enumerate(parts):
        for v in p:
            part_index[v] = i
    offenders = [
        i
        for i, e in enumerate(hh.edges)
        if sum(
            c - 1
            for c in Counter(part_index[v] for v in e if v in part_index).values()
            if c >= 2
        )
        > 1
    ]
    if offenders:
        raise PlanInvalid(
            f"{len(offenders)} edges collapse into a single part twice", offenders
        )

    x_values = tuple(
        partial_average_excess(hh, PartialCut(2, dict(pc))) for pc in partial_cuts
    )

    # Singleton parts for every remaining vertex, pinned to colour 1.
    blocks: list[tuple[frozenset, dict]] = [
        (p, dict(pc)) for p, pc in zip(parts, partial_cuts)
    ]
    for v in range(n):
        if v not in seen:
            blocks.append((frozenset([v]), {v: 1}))

    block_of = {}
    for b, (vs, _) in enumerate(blocks):
        for v in vs:
            block_of[v] = b

    k_eff = max((len(e) for e in hh.edges), default=2)
    scale = 1 << k_eff

    # Per edge: fixed colour mask from bicolour blocks, plus per-block
    # single-colour contributions that a swap may flip.
    edge_mask = []
    edge_pending: list[dict] = []  # block -> colour (1/2) still undecided
    touching: list[list[int]] = [[] for _ in range(len(blocks))]
    for i, e in enumerate(hh.edges):
        per_block: dict[int, set] = {}
        for v in e:
            per_block.setdefault(block_of[v], set()).add(blocks[block_of[v]][1][v])
        mask = 0
        pending = {}
        for b, colours in per_block.items():
            if len(colours) == 2:
                mask |= 3
            else:
                pending[b] = next(iter(colours))
                touching[b].append(i)
        edge_mask.append(mask)
        edge_pending.append(pending)

    def edge_prob(i: int) -> int:
        mask = edge_mask[i]
        u = len(edge_pending[i])
        c1 = 1 if mask & 1 else 0
        c2 = 1 if mask & 2 else 0
        return _two_cut_prob_scaled(c1, c2, u, scale)

    prob = [edge_prob(i) for i in range(len(hh.edges))]
    expected_sigma = sum(prob)

    base = uniform_expected_size(hh, 2)
    if Fraction(expected_sigma, scale) != base + sum(x_values, Fraction(0)):
        raise CertificateError("swap-uniform expectation != base + sum of average excesses")

    running = expected_sigma
    swaps = []
    for b in range(len(blocks)):
        deltas = [0, 0]
        for s in (0, 1):
            for i in touching[b]:
                colour = edge_pending[i][b]
                if s == 1:
                    colour = 3 - colour
                mask = edge_mask[i] | (1 if colour == 1 else 2)
                u = len(edge_pending[i]) - 1
                c1 = 1 if mask & 1 else 0
                c2 = 1 if mask & 2 else 0
                deltas[s] += _two_cut_prob_scaled(c1, c2, u, scale) - prob[i]
        s_star = 0 if deltas[0] >= deltas[1] else 1
        swaps.append(s_star)
        for i in touching[b]:
            colour = edge_pending[i].pop(b)
            if s_star == 1:
                colour = 3 - colour
            edge_mask[i] |= 1 if colour == 1 else 2
            prob[i] = edge_prob(i)
        running += deltas[s_star]

    assignment = [1] * n
    for b, (vs, pc) in enumerate(blocks):
        for v in vs:
            colour = pc[v]
            if swaps[b] == 1:
                colour = 3 - colour
            assignment[v] = colour
    cut = Cut(2, tuple(assignment))

    realized = sum(1 for e in hh.edges if len({assignment[v] for v in e}) == 2)
    if realized * scale != running:
        raise CertificateError("combined realized size differs from final expectation")
    realized_excess = realized - base
    promised = sum(x_values, Fraction(0))
    if realized_excess < promised:
        raise GuaranteeViolation(
            f"combined excess {realized_excess} below promised {promised}"
        )
    plan = CombinePlan(
        parts=tuple(parts),
        partial_cuts=tuple(dict(pc) for pc in partial_cuts),
        average_excesses=x_values,
        swaps=tuple(swaps[: len(parts)]),
        realized_excess=realized_excess,
    )
    return cut, plan


def conditional_rcut(h: Hypergraph, r: int, order=None) -> Cut:
    """Plain conditional-expectations r-cut; realized excess is never negative.

    Assigns each vertex, in order, to the part maximizing the exact
    conditional expected number of multicoloured edges with the remaining
    vertices uniform over all r parts.  Ties prefer the smallest part id.
    """
    if r < 2:
        raise InvalidParams("need r >= 2")
    n = h.n_vertices
    seq = list(range(n)) if order is None else list(order)
    inc = h.incidence()
    hit = [frozenset() for _ in h.edges]
    freec = [len(e) for e in h.edges]

    def p_of(i: int) -> Fraction:
        return multicolour_probability(len(h.edges[i]), hit[i], freec[i], r)

    prob = [p_of(i) for i in range(len(h.edges))]
    expected = sum(prob, Fraction(0))
    base = expected
    assignment = [1] * n
    for v in seq:
        best = None
        for p in range(1, r + 1):
            delta = Fraction(0)
            for ei in inc[v]:
                delta += (
                    multicolour_probability(
                        len(h.edges[ei]), hit[ei] | {p}, freec[ei] - 1, r
                    )
                    - prob[ei]
                )
            if best is None or delta > best[0]:
                best = (delta, p)
        assignment[v] = best[1]
        for ei in inc[v]:
            expected -= prob[ei]
            hit[ei] = hit[ei] | {best[1]}
            freec[ei] -= 1
            prob[ei] = p_of(ei)
            expected += prob[ei]
    cut = Cut(r, tuple(assignment))
    realized = sum(
        1 for e in h.edges if {assignment[v] for v in e} == set(range(1, r + 1))
    )
    if Fraction(realized) != expected:
        raise CertificateError("conditional r-cut bookkeeping mismatch")
    if realized < base:
        raise GuaranteeViolation("conditional r-cut fell below the random baseline")
    return cut


def point_local_search(h: Hypergraph, cut: Cut) -> Cut:
    """Move single vertices between parts until no move grows the cut size."""
    r = cut.r
    n = h.n_vertices
    if len(cut.assignment) != n:
        raise InvalidCut("assignment length mismatch")
    inc = h.incidence()
    part = list(cut.assignment)
    counts = [[0] * (r + 1) for _ in h.edges]
    for i, e in enumerate(h.edges):
        for v in e:
            counts[i][part[v]] += 1
    covered = [sum(1 for p in range(1, r + 1) if c[p]) for c in counts]

    def move_gain(v: int, q: int) -> int:
        p = part[v]
        gain = 0
        for ei in inc[v]:
            c = counts[ei]
            before = covered[ei] == r
            hits = covered[ei]
            if c[p] == 1:
                hits -= 1
            if c[q] == 0:
                hits += 1
            gain += (1 if hits == r else 0) - (1 if before else 0)
        return gain

    improved = True
    while improved:
        improved = False
        for v in range(n):
            best = (0, part[v])
            for q in range(1, r + 1):
                if q == part[v]:
                    continue
                g = move_gain(v, q)
                if g > best[0]:
                    best = (g, q)
            if best[0] > 0:
                p, q = part[v], best[1]
                for ei in inc[v]:
                    c = counts[ei]
                    if c[p] == 1:
                        covered[ei] -= 1
                    c[p] -= 1
                    if c[q] == 0:
                        covered[ei] += 1
                    c[q] += 1
                part[v] = q
                improved = True
    return Cut(r, tuple(part))
