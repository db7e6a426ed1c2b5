"""Top-level solver: structure analysis, good-partition drivers, baselines.

The solver runs every applicable route (conditional-expectations
baselines, chromatic balancing, the partial-exposure drivers) and
returns the best cut together with a guarantee ledger.  Each ledger
entry pairs a promised excess with the realized one; deterministic
promises are hard, any shortfall raises ``GuaranteeViolation`` and means
a bug in the math layer.
"""

from __future__ import annotations

import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .core import Hypergraph, clique_expand, degree_profile, induce
from .cutspace import (
    Cut,
    cut_metrics,
    multicolour_probability,
)
from .derand import (
    conditional_rcut,
    erdos_selfridge_2cut,
    combine_partial_cuts,
    flip_local_search,
    greedy_on_adjacency,
    greedy_order_cut,
    order_for_W,
    point_local_search,
)
from .errors import (
    DriverInapplicable,
    GuaranteeViolation,
    CertificateError,
    InvalidParams,
    SearchFailed,
)
from .reductions import (
    dense_subset_cut,
    expand_3graph,
    exposure_average_excess,
    hpart_double,
    hpart_expose,
    lift_2cut_to_3cut,
    rgraph_expand,
    weighted_identity_check,
    weighted_reduce,
)


@dataclass(frozen=True)
class PipelineParams:
    """Tunable constants; the defaults clear the desk-scale corpus with margin."""

    c: float = 0.25
    c_prime: float = 0.125
    retry_budget: int = 50
    trials: int = 32
    seed: int = 0

    def with_seed(self, seed) -> "PipelineParams":
        return PipelineParams(self.c, self.c_prime, self.retry_budget, self.trials, seed)


@dataclass(frozen=True)
class DerivedParams:
    delta: float  # m^(5/9)
    g: float  # m^(7/45)
    q: float  # m^(19/45)
    p: float  # delta^(-3/5) min (g^(-2/3) delta^(-1/3))
    p_prime: float
    t: int


def derive_params(m: int, params: PipelineParams) -> DerivedParams:
    m = max(m, 1)
    delta = m ** (5 / 9)
    g = m ** (7 / 45)
    q = m ** (19 / 45)
    p = min(delta ** (-3 / 5), g ** (-2 / 3) * delta ** (-1 / 3))
    p_prime = params.c_prime * p
    t = max(1, round(1 / p_prime))
    return DerivedParams(delta, g, q, p, p_prime, t)


@dataclass(frozen=True)
class LedgerEntry:
    """One promised-vs-realized excess pair.

    ``scope`` distinguishes claims about the instance whose cut is being
    returned ("instance") from claims about an intermediate forward
    instance inside a reduction chain ("stage"); only instance-scope
    promises may be compared against the final cut's excess.
    """

    claim: str
    promised: Fraction | None
    realized: Fraction
    deterministic: bool
    scope: str = "instance"

    @property
    def ok(self) -> bool:
        if not self.deterministic or self.promised is None:
            return True
        return self.realized >= self.promised

    @property
    def status(self) -> str:
        if not self.deterministic or self.promised is None:
            return "advisory"
        return "ok" if self.ok else "VIOLATED"


@dataclass
class GuaranteeLedger:
    entries: list = field(default_factory=list)

    def add(self, claim, promised, realized, deterministic=True, scope="instance"):
        self.entries.append(
            LedgerEntry(claim, promised, Fraction(realized), deterministic, scope)
        )

    def extend(self, other: "GuaranteeLedger", prefix: str = "", demote: bool = False):
        """Merge entries; ``demote`` marks them all as stage-level claims."""
        for e in other.entries:
            scope = "stage" if demote else e.scope
            self.entries.append(
                LedgerEntry(prefix + e.claim, e.promised, e.realized, e.deterministic, scope)
            )

    def instance_promise(self) -> Fraction:
        """Largest deterministic promise made about this instance's excess."""
        return max(
            [Fraction(0)]
            + [
                e.promised
                for e in self.entries
                if e.deterministic and e.promised is not None and e.scope == "instance"
            ]
        )

    def violations(self) -> list:
        return [e for e in self.entries if not e.ok]

    def assert_ok(self) -> None:
        bad = self.violations()
        if bad:
            raise GuaranteeViolation(
                "; ".join(f"{e.claim}: {e.realized} < {e.promised}" for e in bad)
            )


# --------------------------------------------------------------- structure


@dataclass(frozen=True)
class StructureReport:
    u_set: frozenset
    matching: tuple  # disjoint high-codegree pairs
    branch: str  # matching-cut | dense-induced | high-U-incidence
    induced_edges: int  # e(H[U])
    high_u_edges: int  # edges with >= k-1 vertices in U
    delta: float
    g: float
    q: float


def codegree_structure(h: Hypergraph, params: PipelineParams) -> StructureReport:
    """Greedy matching on high-codegree pairs, else the low-degree core U.

    With fewer than q matched pairs, U keeps every unmatched vertex of
    degree at most Delta, so |U| >= n - 2q - km/Delta.
    """
    d = derive_params(h.m, params)
    prof = degree_profile(h)
    heavy = sorted(
        (pair for pair, cd in prof.codegree.items() if cd > d.g),
        key=lambda pr: (-prof.codegree[pr], pr),
    )
    matched: list[tuple[int, int]] = []
    used: set[int] = set()
    for u, v in heavy:
        if u in used or v in used:
            continue
        matched.append((u, v))
        used.update((u, v))
    if len(matched) >= d.q:
        return StructureReport(
            frozenset(), tuple(matched), "matching-cut", 0, 0, d.delta, d.g, d.q
        )
    u_set = frozenset(
        v for v in range(h.n_vertices) if v not in used and prof.degree[v] <= d.delta
    )
    k_bound = max(h.max_arity, 1)
    if len(u_set) + 1e-9 < h.n_vertices - 2 * d.q - k_bound * h.m / d.delta:
        raise CertificateError("core-size bound violated; structure pass is wrong")
    induced = sum(1 for e in h.edges if all(v in u_set for v in e))
    high = sum(1 for e in h.edges if sum(v in u_set for v in e) >= len(e) - 1)
    k = max(h.max_arity, 1)
    branch = "dense-induced" if induced >= h.m / (4 * k) else "high-U-incidence"
    return StructureReport(
        u_set, tuple(matched), branch, induced, high, d.delta, d.g, d.q
    )


def conditioned_matching_cut(
    h: Hypergraph, matching, r: int, trials: int, seed
) -> Cut:
    """Best random r-cut forcing each matched pair into two distinct parts."""
    if trials < 1:
        raise InvalidParams("trials must be >= 1")
    pairs = [tuple(p) for p in matching]
    used = [v for p in pairs for v in p]
    if len(set(used)) != len(used):
        raise InvalidParams("matching pairs must be disjoint")
    rng = random.Random(f"matching-cut:{seed}")
    best = None
    for _ in range(trials):
        assignment = [rng.randint(1, r) for _ in range(h.n_vertices)]
        for u, v in pairs:
            a = rng.randint(1, r)
            b = rng.randint(1, r - 1)
            if b >= a:
                b += 1
            assignment[u], assignment[v] = a, b
        cut = Cut(r, tuple(assignment))
        size = int(cut_metrics(h, cut).size)
        if best is None or size > best[0]:
            best = (size, cut)
    return best[1]


# --------------------------------------------------------------- goodness


@dataclass(frozen=True)
class GoodnessReport:
    within_pair_edges: int  # (i): pair edges of G(h_sub) inside parts
    max_within_degree: int  # (ii): max within-part G(h) degree
    violations_spread: tuple  # (iii): h-edge indices
    violations_witness: tuple  # (iv): pairs of h-edge indices


def goodness_audit(h: Hypergraph, h_sub: Hypergraph, partition, vertex_set) -> GoodnessReport:
    """Exact counts for the four goodness properties of a partition.

    ``partition`` splits ``vertex_set`` (the sub-hypergraph's vertex set).
    Property (iii) asks every h-edge to spread over at least
    |e ∩ vertex_set| - 1 parts; (iv) forbids two edges from pairing up
    inside one part while also meeting in ``vertex_set`` outside it.
    """
    vset = frozenset(vertex_set)
    where = {}
    for i, p in enumerate(partition):
        for v in p:
            where[v] = i

    within = 0
    for e in h_sub.edges:
        counts = Counter(where[v] for v in e if v in where)
        within += sum(c * (c - 1) // 2 for c in counts.values())

    within_deg = Counter()
    for e in h.edges:
        by_part = defaultdict(list)
        for v in e:
            if v in where:
                by_part[where[v]].append(v)
        for vs in by_part.values():
            for v in vs:
                within_deg[v] += len(vs) - 1
    max_deg = max(within_deg.values(), default=0)

    spread_bad = []
    for i, e in enumerate(h.edges):
        counts = Counter(where[v] for v in e if v in where)
        collisions = sum(c - 1 for c in counts.values() if c >= 2)
        if collisions > 1:
            spread_bad.append(i)

    witness_bad: set[tuple[int, int]] = set()
    bucket: dict[tuple[int, int], list[tuple[int, frozenset]]] = defaultdict(list)
    for i, e in enumerate(h.edges):
        by_part = defaultdict(list)
        outside = []
        for v in e:
            if v in where:
                by_part[where[v]].append(v)
        for pi, vs in by_part.items():
            if len(vs) < 2:
                continue
            pair = frozenset(vs)
            for w in e:
                if w in vset and where.get(w) != pi:
                    bucket[(pi, w)].append((i, pair))
    for entries in bucket.values():
        for a in range(len(entries)):
            for b in range(a + 1, len(entries)):
                i, pi_pair = entries[a]
                j, pj_pair = entries[b]
                if i == j:
                    continue
                if len(pi_pair | pj_pair) >= 3:
                    witness_bad.add((min(i, j), max(i, j)))

    return GoodnessReport(within, max_deg, tuple(spread_bad), tuple(sorted(witness_bad)))


@dataclass(frozen=True)
class GoodPartition:
    parts: tuple
    m_prime: int  # realized within-part pair-edge count after deletion
    delta_prime: float  # within-degree bound the partition honours
    m_target: float
    deleted_edges: tuple  # h-edge indices removed to reach full goodness
    violations_spread: tuple
    violations_witness: tuple


def good_partition_search(
    h: Hypergraph,
    h_sub: Hypergraph,
    vertex_set,
    params: PipelineParams,
    seed=None,
) -> GoodPartition:
    """Sample uniform t-part partitions until one is almost good, then fix it.

    Success means: after deleting the few offending edges, the partition
    has zero spread/witness violations, at least m' within-part pair
    edges of the sub-hypergraph, and within-part degree at most Delta'.
    """
    d = derive_params(h.m, params)
    vset = sorted(set(vertex_set))
    rng = random.Random(f"good-partition:{params.seed if seed is None else seed}")
    k = max(h.max_arity, 2)
    m1 = d.p_prime * h_sub.m / 2
    delta_prime = 2 * d.p_prime * k * d.delta
    y = params.c * m1 / math.sqrt(delta_prime) if delta_prime > 0 else 0.0

    best_report = None
    for _ in range(params.retry_budget):
        parts = [set() for _ in range(d.t)]
        for v in vset:
            parts[rng.randrange(d.t)].add(v)
        report = goodness_audit(h, h_sub, parts, vset)
        if best_report is None or len(report.violations_spread) + len(
            report.violations_witness
        ) < len(best_report.violations_spread) + len(best_report.violations_witness):
            best_report = report
        if report.within_pair_edges < 2 * m1 or report.max_within_degree > delta_prime:
            continue
        if len(report.violations_spread) > y / 2 or len(report.violations_witness) > y / 2:
            continue
        drop = set(report.violations_spread)
        drop.update(max(i, j) for i, j in report.violations_witness)
        kept_sub = Counter(h_sub.edges)
        for i in drop:
            e = h.edges[i]
            if kept_sub[e] > 0:
                kept_sub[e] -= 1
        h_del = h.without_edges(drop)
        sub_del_edges = [e for e, c in kept_sub.items() for _ in range(c)]
        sub_del = Hypergraph(h.n_vertices, h_sub.max_arity, tuple(sub_del_edges))
        post = goodness_audit(h_del, sub_del, parts, vset)
        if (
            post.violations_spread
            or post.violations_witness
            or post.within_pair_edges < m1
            or post.max_within_degree > delta_prime
        ):
            continue
        return GoodPartition(
            parts=tuple(frozenset(p) for p in parts),
            m_prime=post.within_pair_edges,
            delta_prime=delta_prime,
            m_target=m1,
            deleted_edges=tuple(sorted(drop)),
            violations_spread=report.violations_spread,
            violations_witness=report.violations_witness,
        )
    raise SearchFailed(
        f"no good partition within {params.retry_budget} samples", best=best_report
    )


# --------------------------------------------------------------- drivers


def _restore_entry(h: Hypergraph, hd: Hypergraph, r: int, cut: Cut, promise_hd: Fraction):
    """Promise carried back to the undeleted instance."""
    deleted_expectation = sum(
        (multicolour_probability(len(e), (), len(e), r) for e in h.edges),
        Fraction(0),
    ) - sum(
        (multicolour_probability(len(e), (), len(e), r) for e in hd.edges),
        Fraction(0),
    )
    return promise_hd - deleted_expectation


def driver_3cut(
    h: Hypergraph, u_set, params: PipelineParams
) -> tuple[Cut, GuaranteeLedger]:
    """3-cut via part-3 exposure, per-part greedy cuts, and swap combination."""
    if any(len(e) > 3 for e in h.edges):
        raise DriverInapplicable("driver_3cut needs edge sizes at most 3")
    u_set = set(u_set)
    h_u = induce(h, u_set, min_inside=None)
    k = max(h.max_arity, 1)
    if h_u.m < h.m / (4 * k):
        raise DriverInapplicable("induced core holds too few edges")
    gp = good_partition_search(h, h_u, u_set, params, seed=f"d3:{params.seed}")
    hd = h.without_edges(set(gp.deleted_edges))

    best = None
    for trial in range(params.trials):
        rng = random.Random(f"driver3:{params.seed}:{trial}")
        rho = {v: 3 for v in range(h.n_vertices) if rng.random() < 1 / 3}
        red = hpart_expose(hd, 3, rho, keep=2)
        gpart: Hypergraph = red.forward

        part_of = {}
        for i, p in enumerate(gp.parts):
            for v in p:
                part_of[v] = i
        internal = defaultdict(list)
        for e in gpart.edges:
            u, v = e
            pu, pv = part_of.get(u), part_of.get(v)
            if pu is not None and pu == pv and u not in rho and v not in rho:
                internal[pu].append((u, v))

        part_sets = []
        partials = []
        for i, p in enumerate(gp.parts):
            star = {v for v in p if v not in rho}
            if not star:
                continue
            local = defaultdict(list)
            for u, v in internal.get(i, ()):
                local[u].append((v, 1))
                local[v].append((u, 1))
            order = sorted(star)
            rng.shuffle(order)
            assigned, _, _ = greedy_on_adjacency(local, order)
            part_sets.append(star)
            partials.append(assigned)

        if part_sets:
            c2, plan = combine_partial_cuts(gpart, part_sets, partials)
            promise_fwd = sum(plan.average_excesses, Fraction(0))
            fwd_excess = plan.realized_excess
        else:
            c2 = conditional_rcut(gpart, 2)
            promise_fwd = Fraction(0)
            fwd_excess = cut_metrics(gpart, c2).excess
        c3 = red.back_map(c2)
        metrics = cut_metrics(hd, c3)
        pae = exposure_average_excess(hd, 3, rho, keep=2)
        if metrics.excess != fwd_excess + pae:
            raise CertificateError("3-cut exposure transfer identity failed")
        promise_hd = promise_fwd + pae
        cand = (int(metrics.size), trial, c3, promise_fwd, fwd_excess, promise_hd, metrics.excess)
        if best is None or cand[0] > best[0]:
            best = cand

    _, _, c3, promise_fwd, fwd_excess, promise_hd, excess_hd = best
    ledger = GuaranteeLedger()
    ledger.add("combined per-part greedy gains", promise_fwd, fwd_excess, scope="stage")
    ledger.add("part-3 exposure transfer", promise_hd, excess_hd, scope="stage")
    promise_h = _restore_entry(h, hd, 3, c3, promise_hd)
    ledger.add("deleted-edge restoration", promise_h, cut_metrics(h, c3).excess)
    ledger.assert_ok()
    return c3, ledger


def driver_2cut(
    h: Hypergraph, params: PipelineParams, u_set=None
) -> tuple[Cut, GuaranteeLedger]:
    """2-cut via the doubled-exposure construction and weighted greedy parts."""
    n = h.n_vertices
    k = max(h.max_arity, 2)
    if u_set is not None and set(u_set) != set(range(n)):
        return _driver_2cut_wrapped(h, params, set(u_set))

    big = [i for i, e in enumerate(h.edges) if len(e) >= 4]
    if len(big) < h.m / (4 * k):
        raise DriverInapplicable("too few edges of size >= 4")
    h4 = Hypergraph(n, k, tuple(h.edges[i] for i in big))
    gp = good_partition_search(h, h4, range(n), params, seed=f"d2:{params.seed}")
    dropped = set(gp.deleted_edges)
    hd = h.without_edges(dropped)
    part_of = {}
    for i, p in enumerate(gp.parts):
        for v in p:
            part_of[v] = i
    # per >=4-edge: its doubled part (if any) with the two inside vertices
    paired = []
    for i in big:
        if i in dropped:
            continue
        e = h.edges[i]
        by_part = Counter(part_of[v] for v in e if v in part_of)
        doubled = [pi for pi, c in by_part.items() if c == 2]
        if doubled:
            inside = tuple(v for v in e if part_of.get(v) == doubled[0])
            paired.append((e, inside))

    best = None
    for trial in range(params.trials):
        rng = random.Random(f"driver2:{params.seed}:{trial}")

        w_best = None
        for _ in range(params.retry_budget):
            w = {v for v in range(n) if rng.random() < 0.5}
            gi_total = sum(
                1
                for e, inside in paired
                if all(v in w for v in inside)
                and sum(1 for v in e if v not in w) >= 2
            )
            if w_best is None or gi_total > w_best[0]:
                w_best = (gi_total, w)
            if gi_total >= max(1.0, gp.m_prime / 32):
                break
        _, w = w_best

        red = None
        for _ in range(params.retry_budget):
            rho = {v: rng.choice((1, 2)) for v in range(n) if v not in w}
            cand = hpart_double(hd, w, rho)
            if cand.conditional_size >= cand.base_size:
                red = cand
                break
        if red is None:
            continue
        hpart: Hypergraph = red.forward

        part_sets = []
        partials = []
        for p in gp.parts:
            vs = {v for v in p if v in w}
            if not vs:
                continue
            wg = weighted_reduce(hpart, vs)
            local = defaultdict(list)
            for uu, vv, wt in wg.weights:
                local[uu].append((vv, wt))
                local[vv].append((uu, wt))
            order = sorted(vs)
            rng.shuffle(order)
            assigned, _, _ = greedy_on_adjacency(local, order)
            weighted_identity_check(hpart, wg, assigned)
            part_sets.append(vs)
            partials.append(assigned)

        if part_sets:
            phi, plan = combine_partial_cuts(hpart, part_sets, partials)
            promise_fwd = sum(plan.average_excesses, Fraction(0))
            fwd_excess = plan.realized_excess
        else:
            phi = conditional_rcut(hpart, 2)
            promise_fwd = Fraction(0)
            fwd_excess = cut_metrics(hpart, phi).excess
        c2 = red.back_map(phi)
        metrics = cut_metrics(hd, c2)
        promise_hd = promise_fwd / 2 + (red.conditional_size - red.base_size)
        if metrics.excess < promise_hd:
            raise GuaranteeViolation("doubled-exposure promise missed")
        cand = (int(metrics.size), trial, c2, promise_fwd, fwd_excess, promise_hd, metrics.excess)
        if best is None or cand[0] > best[0]:
            best = cand

    if best is None:
        raise SearchFailed("no exposure met the conditional-size bar")
    _, _, c2, promise_fwd, fwd_excess, promise_hd, excess_hd = best
    ledger = GuaranteeLedger()
    ledger.add("combined weighted greedy gains", promise_fwd, fwd_excess, scope="stage")
    ledger.add("doubled exposure transfer", promise_hd, excess_hd, scope="stage")
    promise_h = _restore_entry(h, hd, 2, c2, promise_hd)
    ledger.add("deleted-edge restoration", promise_h, cut_metrics(h, c2).excess)
    ledger.assert_ok()
    return c2, ledger


def _driver_2cut_wrapped(h: Hypergraph, params: PipelineParams, u_set: set):
    """Remove the bad vertices first: expose them, solve the doubled instance."""
    rng = random.Random(f"nobad:{params.seed}")
    outside = [v for v in range(h.n_vertices) if v not in u_set]
    red = None
    for _ in range(params.retry_budget):
        rho = {v: rng.choice((1, 2)) for v in outside}
        cand = hpart_double(h, u_set, rho)
        if cand.conditional_size >= cand.base_size:
            red = cand
            break
    if red is None:
        raise SearchFailed("no exposure of the bad vertices met the bar")
    inner_cut, inner_ledger = driver_2cut(red.forward, params, u_set=None)
    best = red.back_map(inner_cut)
    ledger = GuaranteeLedger()
    ledger.extend(inner_ledger, prefix="inner ", demote=True)
    inner_promise = inner_ledger.instance_promise()
    promise = inner_promise / 2 + (red.conditional_size - red.base_size)
    ledger.add("bad-vertex exposure transfer", promise, cut_metrics(h, best).excess)
    ledger.assert_ok()
    return best, ledger


# --------------------------------------------------------------- chromatic


def chromatic_cut(h: Hypergraph, r: int, trials: int, seed) -> tuple[Cut, int]:
    """Best of random r-splits of a greedy strong colouring's classes."""
    if trials < 1:
        raise InvalidParams("trials must be >= 1")
    g = clique_expand(h)
    neighbours: list[set] = [set() for _ in range(h.n_vertices)]
    for u, v, _ in g.pairs:
        neighbours[u].add(v)
        neighbours[v].add(u)
    order = sorted(range(h.n_vertices), key=lambda v: (-len(neighbours[v]), v))
    colour = [-1] * h.n_vertices
    for v in order:
        taken = {colour[u] for u in neighbours[v] if colour[u] >= 0}
        c = 0
        while c in taken:
            c += 1
        colour[v] = c
    chi = max(colour, default=-1) + 1
    padded = chi + (-chi) % r
    classes = list(range(padded))

    rng = random.Random(f"chromatic:{seed}")
    best = None
    for _ in range(trials):
        rng.shuffle(classes)
        group = {}
        per = padded // r
        for idx, cls in enumerate(classes):
            group[cls] = idx // per + 1
        cut = Cut(r, tuple(group[colour[v]] for v in range(h.n_vertices)))
        size = int(cut_metrics(h, cut).size)
        if best is None or size > best[0]:
            best = (size, cut)
    return best[1], chi


# --------------------------------------------------------------- solve


def _candidate(candidates, name, cut):
    candidates.append((name, cut))


def solve(h: Hypergraph, r: int, params: PipelineParams | None = None) -> tuple[Cut, GuaranteeLedger]:
    """Best cut across every applicable route, with a verified ledger.

    Always runs the conditional-expectations and chromatic baselines, so
    the returned excess is never negative; the structure-dependent
    drivers add their own deterministic promises when they apply.
    """
    params = params or PipelineParams()
    if h.m == 0:
        raise InvalidParams("instance has no edges")
    k = max(h.max_arity, 2)
    if not (2 <= r <= k):
        raise InvalidParams(f"need 2 <= r <= k, got r={r}, k={k}")
    n = h.n_vertices
    ledger = GuaranteeLedger()
    candidates: list[tuple[str, Cut]] = []

    base_cut = conditional_rcut(h, r)
    ledger.add("conditional-expectations baseline", Fraction(0), cut_metrics(h, base_cut).excess)
    _candidate(candidates, "cond-exp", base_cut)

    chrom, chi = chromatic_cut(h, r, params.trials, params.seed)
    ledger.add(
        f"chromatic balance (chi={chi})", None, cut_metrics(h, chrom).excess, deterministic=False
    )
    _candidate(candidates, "chromatic", chrom)

    if r == 2:
        order = order_for_W(h, min(params.trials, 8), params.seed)
        es_cut, es_ledger = erdos_selfridge_2cut(h, order)
        ledger.add("deferred conditional expectations", es_ledger.guaranteed_excess, es_ledger.realized_excess)
        _candidate(candidates, "es", es_cut)
        if all(len(e) == 2 for e in h.edges):
            mg = clique_expand(h)
            greedy, _ = greedy_order_cut(mg, order)
            polished = flip_local_search(mg, greedy)
            _candidate(candidates, "greedy-flip", polished)
        elif all(len(e) == 3 for e in h.edges):
            red = expand_3graph(h)
            greedy, gl = greedy_order_cut(red.forward, order)
            polished = flip_local_search(red.forward, greedy)
            back = red.back_map(polished)
            ledger.add(
                "triangle-expansion greedy gains (halved)",
                gl.realized_excess / 2,
                cut_metrics(h, back).excess,
            )
            _candidate(candidates, "expand-greedy", back)
    elif r == 3 and all(len(e) == 3 for e in h.edges):
        order = order_for_W(h, min(params.trials, 8), params.seed)
        c2, es_ledger = erdos_selfridge_2cut(h, order)
        lifted = lift_2cut_to_3cut(h, c2)
        ledger.add(
            "third-part lift of the deferred engine",
            Fraction(8, 27) * es_ledger.realized_excess,
            cut_metrics(h, lifted).excess,
        )
        _candidate(candidates, "es-lift", lifted)
    elif r >= 3:
        merged = _es_exposure_baseline(h, r, params)
        if merged is not None:
            cut, promise = merged
            ledger.add("exposure + deferred engine", promise, cut_metrics(h, cut).excess)
            _candidate(candidates, "es-expose", cut)

    sr = codegree_structure(h, params)
    if sr.branch == "matching-cut":
        cmc = conditioned_matching_cut(h, sr.matching, r, params.trials, params.seed)
        ledger.add(
            f"conditioned matching cut ({len(sr.matching)} pairs)",
            None,
            cut_metrics(h, cmc).excess,
            deterministic=False,
        )
        _candidate(candidates, "matching-cut", cmc)

    complement = sorted(set(range(n)) - sr.u_set)
    if len(complement) >= r:
        dsc = dense_subset_cut(h, complement, r, params.trials, params.seed)
        ledger.add(
            "equitable cut of the heavy complement",
            None,
            cut_metrics(h, dsc).excess,
            deterministic=False,
        )
        _candidate(candidates, "dense-subset", dsc)

    try:
        driver_cut, driver_ledger = _dispatch_driver(h, r, k, sr, params)
        if driver_cut is not None:
            ledger.extend(driver_ledger, prefix="pipeline: ")
            _candidate(candidates, "pipeline", driver_cut)
    except (SearchFailed, DriverInapplicable):
        pass

    scored = [
        (int(cut_metrics(h, cut).size), name, cut) for name, cut in candidates
    ]
    scored.sort(key=lambda x: (-x[0], x[1]))
    best = point_local_search(h, scored[0][2])
    final = cut_metrics(h, best)
    ledger.add("best-of selection with local moves", ledger.instance_promise(), final.excess)
    ledger.assert_ok()
    return best, ledger


def _es_exposure_baseline(h: Hypergraph, r: int, params: PipelineParams):
    """Expose parts {3..r} at random, run the deferred engine, merge back."""
    rng = random.Random(f"es-expose:{params.seed}")
    for _ in range(params.retry_budget):
        rho = {}
        for v in range(h.n_vertices):
            if rng.random() >= 2 / r:
                rho[v] = rng.randint(3, r)
        pae = exposure_average_excess(h, r, rho, keep=2)
        if pae < 0:
            continue
        red = hpart_expose(h, r, rho, keep=2)
        if red.forward.m == 0:
            continue
        order = order_for_W(red.forward, 4, params.seed)
        c2, es_ledger = erdos_selfridge_2cut(red.forward, order)
        merged = red.back_map(c2)
        if cut_metrics(h, merged).excess != cut_metrics(red.forward, c2).excess + pae:
            raise CertificateError("exposure baseline transfer identity failed")
        return merged, es_ledger.guaranteed_excess + pae
    return None


def _dispatch_driver(h, r, k, sr: StructureReport, params):
    """Route to the structural driver fitting (r, k), certified end to end."""
    if sr.branch == "matching-cut":
        return None, None
    if r == 3 and k == 3:
        return driver_3cut(h, sr.u_set, params)
    if r == 2 and k >= 4:
        u = None if sr.u_set == frozenset(range(h.n_vertices)) else sr.u_set
        return driver_2cut(h, params, u_set=u)
    if 3 <= r <= k - 2:
        return _driver_expose_2(h, r, sr, params)
    if r == k - 1 and k >= 4:
        if any(len(e) != k for e in h.edges):
            return None, None  # subset expansion needs a uniform instance
        red = rgraph_expand(h, r)
        sub_cut, sub_ledger = solve(red.forward, r, params)
        best = red.back_map(sub_cut)
        ledger = GuaranteeLedger()
        ledger.extend(sub_ledger, prefix="subset-expansion ", demote=True)
        sub_promise = sub_ledger.instance_promise()
        ledger.add("subset-expansion halving", sub_promise / 2, cut_metrics(h, best).excess)
        return best, ledger
    if r == k and k > 3:
        return _driver_expose_3(h, r, sr, params)
    return None, None


def _driver_expose_2(h, r, sr, params):
    """r <= k-2: expose parts {3..r}, drive the mixed 2-cut engine, merge."""
    rng = random.Random(f"expose2:{params.seed}")
    for _ in range(params.retry_budget):
        rho = {}
        for v in range(h.n_vertices):
            if rng.random() >= 2 / r:
                rho[v] = rng.randint(3, r)
        pae = exposure_average_excess(h, r, rho, keep=2)
        if pae < 0:
            continue
        red = hpart_expose(h, r, rho, keep=2)
        if red.forward.m == 0:
            continue
        stars = {v for v in range(h.n_vertices) if v not in rho}
        u = stars & sr.u_set
        try:
            sub_cut, sub_ledger = driver_2cut(
                red.forward, params, u_set=None if u == stars else u
            )
        except (SearchFailed, DriverInapplicable):
            continue
        merged = red.back_map(sub_cut)
        ledger = GuaranteeLedger()
        ledger.extend(sub_ledger, prefix="exposed ", demote=True)
        sub_promise = sub_ledger.instance_promise()
        ledger.add("exposure transfer", sub_promise + pae, cut_metrics(h, merged).excess)
        return merged, ledger
    raise SearchFailed("no viable exposure for the 2-cut driver")


def _driver_expose_3(h, r, sr, params):
    """r = k > 3: expose parts {4..k}, reduce to 3-cuts of a 3-multigraph."""
    rng = random.Random(f"expose3:{params.seed}")
    for _ in range(params.retry_budget):
        rho = {}
        for v in range(h.n_vertices):
            if rng.random() >= 3 / r:
                rho[v] = rng.randint(4, r)
        pae = exposure_average_excess(h, r, rho, keep=3)
        if pae < 0:
            continue
        red = hpart_expose(h, r, rho, keep=3)
        if red.forward.m == 0:
            continue
        sub_cut, sub_ledger = solve(red.forward, 3, params)
        merged = red.back_map(sub_cut)
        ledger = GuaranteeLedger()
        ledger.extend(sub_ledger, prefix="exposed ", demote=True)
        sub_promise = sub_ledger.instance_promise()
        ledger.add("exposure transfer", sub_promise + pae, cut_metrics(h, merged).excess)
        return merged, ledger
    raise SearchFailed("no viable exposure for the 3-cut reduction")
