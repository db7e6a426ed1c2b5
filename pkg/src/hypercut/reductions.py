"""Cut-problem transformations with machine-checked certificates.

Every reduction carries a ``back_map`` that converts a cut of the
forward instance into a cut of the original and verifies the exact size
relation on the spot; a mismatch raises ``CertificateError`` and means a
bug, never bad input.  The proofs chain several of these reductions, so
this per-run checking is the artifact's central safety mechanism.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable

from .core import Hypergraph, Multigraph, WeightedGraph, clique_expand
from .cutspace import (
    Cut,
    PartialCut,
    cut_metrics,
    partial_average_excess,
    partial_average_size,
)
from .errors import (
    CertificateError,
    InvalidArity,
    InvalidExposure,
    InvalidParams,
    InvalidReduction,
)


@dataclass
class Reduction:
    """A forward instance plus a certified map back to the original."""

    kind: str
    forward: object
    back_map: Callable[[Cut], Cut]
    exposure: dict | None = None
    scale: Fraction | None = None  # forward size = scale * original size, when exact


def _multigraph_cut_size(g: Multigraph, cut: Cut) -> int:
    return sum(m for u, v, m in g.pairs if cut.assignment[u] != cut.assignment[v])


def expand_3graph(h: Hypergraph) -> Reduction:
    """3-graph 2-cuts as multigraph cuts on the triangle expansion.

    A 2-cut of size z in h is a cut of size exactly 2z in the 3m-edge
    multigraph; the assignment is shared.
    """
    if any(len(e) != 3 for e in h.edges):
        raise InvalidArity("expand_3graph needs a 3-uniform hypergraph")
    forward = clique_expand(h)

    def back_map(cut: Cut) -> Cut:
        if cut.r != 2 or len(cut.assignment) != h.n_vertices:
            raise InvalidParams("expected a 2-cut on the shared vertex set")
        z_graph = _multigraph_cut_size(forward, cut)
        z_hyper = int(cut_metrics(h, cut).size)
        if z_graph != 2 * z_hyper:
            raise CertificateError(
                f"triangle expansion: multigraph size {z_graph} != 2*{z_hyper}"
            )
        return cut

    return Reduction("expand-3graph", forward, back_map, scale=Fraction(2))


def rgraph_expand(h: Hypergraph, r: int) -> Reduction:
    """k-edges replaced by their (k-1)-subsets; sizes halve on the way back.

    A multicoloured k-edge under k-1 parts repeats exactly one part, so
    exactly two of its k subsets are rainbow; non-multicoloured edges
    contribute none.
    """
    k = h.max_arity
    if any(len(e) != k for e in h.edges):
        raise InvalidArity("rgraph_expand needs a k-uniform hypergraph")
    if r != k - 1 or r < 3:
        raise InvalidParams(f"rgraph_expand needs r = k-1 >= 3, got r={r}, k={k}")
    sub_edges = [c for e in h.edges for c in combinations(e, r)]
    forward = Hypergraph(h.n_vertices, r, tuple(sub_edges))

    def back_map(cut: Cut) -> Cut:
        if cut.r != r or len(cut.assignment) != h.n_vertices:
            raise InvalidParams("expected an r-cut on the shared vertex set")
        z_fwd = int(cut_metrics(forward, cut).size)
        z_orig = int(cut_metrics(h, cut).size)
        if z_fwd != 2 * z_orig:
            raise CertificateError(
                f"subset expansion: forward size {z_fwd} != 2*{z_orig}"
            )
        return cut

    return Reduction("rgraph-expand", forward, back_map, scale=Fraction(2))


def hpart_expose(h: Hypergraph, r: int, rho: dict, keep: int = 2) -> Reduction:
    """Partial exposure of the top parts; the rest becomes a smaller cut problem.

    ``rho`` assigns parts {keep+1..r} to some vertices; the others
    ("starred") stay free over {1..keep}.  An edge survives iff its
    rho-image covers every exposed part and enough of it is starred:
    at least 2 starred vertices when keep=2 (mixed (k-r+2)-multigraph),
    exactly 3 when keep=3 (3-multigraph).  A keep-cut of the forward
    instance merged with rho is an r-cut of h of exactly the same size.
    """
    if keep not in (2, 3):
        raise InvalidParams("keep must be 2 or 3")
    if r < keep + 1 or r > h.max_arity:
        raise InvalidParams(f"need {keep + 1} <= r <= k, got r={r}, k={h.max_arity}")
    exposed = set(range(keep + 1, r + 1))
    if any(p not in exposed for p in rho.values()):
        raise InvalidExposure(f"rho must assign parts {sorted(exposed)} only")

    fwd_edges = []
    for e in h.edges:
        image = {rho[v] for v in e if v in rho}
        if not image >= exposed:
            continue
        star = tuple(v for v in e if v not in rho)
        if keep == 2 and len(star) >= 2:
            fwd_edges.append(star)
        elif keep == 3 and len(star) == 3:
            fwd_edges.append(star)
    arity = (h.max_arity - r + 2) if keep == 2 else 3
    forward = Hypergraph(h.n_vertices, arity, tuple(fwd_edges))

    def back_map(cut: Cut) -> Cut:
        if cut.r != keep or len(cut.assignment) != h.n_vertices:
            raise InvalidParams(f"expected a {keep}-cut on the shared vertex set")
        merged = tuple(
            rho.get(v, cut.assignment[v]) for v in range(h.n_vertices)
        )
        out = Cut(r, merged)
        z_fwd = int(cut_metrics(forward, cut).size)
        z_orig = int(cut_metrics(h, out).size)
        if z_fwd != z_orig:
            raise CertificateError(
                f"partial exposure: forward size {z_fwd} != original size {z_orig}"
            )
        return out

    return Reduction("hpart-expose", forward, back_map, exposure=dict(rho), scale=Fraction(1))


def exposure_average_excess(h: Hypergraph, r: int, rho: dict, keep: int = 2) -> Fraction:
    """E[Z | exposure] - E[Z] with starred vertices uniform over {1..keep}."""
    pc = PartialCut(r, dict(rho))
    return partial_average_size(h, pc, free_parts=keep) - partial_average_size(
        h, PartialCut(r, {})
    )


@dataclass
class DoubleExposure(Reduction):
    """hpart_double bookkeeping the driver needs for its promise."""

    n_multi: int = 0
    n_undetermined: int = 0
    conditional_size: Fraction = Fraction(0)  # E[Z | exposure]
    base_size: Fraction = Fraction(0)  # E[Z]


def hpart_double(h: Hypergraph, w_set, rho: dict) -> DoubleExposure:
    """Averaging-trick exposure: doubled inside edges plus one-sided stubs.

    The forward instance on W holds two copies of each edge inside W and
    a stub e∩W for each edge whose exposed remainder shows only one part.
    Completing a 2-cut phi of the forward instance with rho, the better
    of phi and its flip has excess at least x'/2 + (E[Z|rho] - E[Z]) where
    x' is phi's forward excess; the underlying average-size identity is
    checked exactly on every back-map.
    """
    w = frozenset(w_set)
    outside = set(range(h.n_vertices)) - w
    if set(rho) != outside:
        raise InvalidExposure("rho must assign exactly the vertices outside W")
    if any(p not in (1, 2) for p in rho.values()):
        raise InvalidExposure("rho assigns parts {1,2}")

    fwd_edges: list[tuple[int, ...]] = []
    n_multi = 0
    n_undet = 0
    for e in h.edges:
        inside = tuple(v for v in e if v in w)
        if len(inside) == len(e):
            fwd_edges.append(inside)
            fwd_edges.append(inside)
            continue
        image = {rho[v] for v in e if v not in w}
        if len(image) == 2:
            n_multi += 1
        elif inside:
            fwd_edges.append(inside)
            n_undet += 1
    forward = Hypergraph(h.n_vertices, h.max_arity, tuple(fwd_edges))
    cond = partial_average_size(h, PartialCut(2, dict(rho)))
    base = partial_average_size(h, PartialCut(2, {}))

    def back_map(phi: Cut) -> Cut:
        if phi.r != 2 or len(phi.assignment) != h.n_vertices:
            raise InvalidParams("expected a 2-cut on the shared vertex set")
        merged = tuple(
            rho[v] if v in rho else phi.assignment[v] for v in range(h.n_vertices)
        )
        flipped = tuple(
            rho[v] if v in rho else 3 - phi.assignment[v]
            for v in range(h.n_vertices)
        )
        omega, omega_bar = Cut(2, merged), Cut(2, flipped)
        z1 = int(cut_metrics(h, omega).size)
        z2 = int(cut_metrics(h, omega_bar).size)
        fwd_metrics = cut_metrics(forward, phi)
        z_part = int(fwd_metrics.size)
        if z1 + z2 != z_part + n_undet + 2 * n_multi:
            raise CertificateError(
                "averaging identity failed: "
                f"{z1}+{z2} != {z_part} + {n_undet} + 2*{n_multi}"
            )
        if cond != fwd_metrics.expected / 2 + Fraction(n_undet, 2) + n_multi:
            raise CertificateError("conditional-size identity failed")
        x_fwd = fwd_metrics.excess
        best = omega if z1 >= z2 else omega_bar
        realized_excess = max(z1, z2) - base
        if realized_excess < x_fwd / 2 + (cond - base):
            raise CertificateError("excess-transfer inequality failed")
        return best

    red = DoubleExposure(
        kind="hpart-double",
        forward=forward,
        back_map=back_map,
        exposure=dict(rho),
        scale=None,
        n_multi=n_multi,
        n_undetermined=n_undet,
        conditional_size=cond,
        base_size=base,
    )
    return red


def weighted_reduce(h: Hypergraph, v_prime) -> WeightedGraph:
    """Average-excess problem on V' as an exactly equivalent weighted graph.

    Each edge meeting V' in exactly {u,v} adds 2^(2-|e|) to the weight
    between u and v; then, for every assignment of V', the weighted excess
    equals the average excess of the partial cut, exactly.
    """
    vp = frozenset(v_prime)
    weights: dict[tuple[int, int], Fraction] = {}
    for e in h.edges:
        inside = [v for v in e if v in vp]
        if len(inside) > 2:
            raise InvalidReduction(
                f"edge {e} meets V' in {len(inside)} > 2 vertices"
            )
        if len(inside) == 2:
            u, v = sorted(inside)
            weights[(u, v)] = weights.get((u, v), Fraction(0)) + Fraction(
                4, 2 ** len(e)
            )
    return WeightedGraph(
        h.n_vertices, tuple((u, v, w) for (u, v), w in sorted(weights.items()))
    )


def weighted_identity_check(h: Hypergraph, wg: WeightedGraph, omega: dict) -> Fraction:
    """Certify the weighted/average-excess identity for one assignment.

    Returns the common value; raises ``CertificateError`` on mismatch.
    """
    n = wg.n_vertices
    assignment = tuple(omega.get(v, 1) for v in range(n))
    dom = frozenset(omega)
    crossing = sum(
        (w for u, v, w in wg.weights if assignment[u] != assignment[v]),
        Fraction(0),
    )
    weighted_excess = crossing - wg.total_weight / 2
    avg = partial_average_excess(h, PartialCut(2, dict(omega)))
    if weighted_excess != avg:
        raise CertificateError(
            f"weighted excess {weighted_excess} != average excess {avg} on {sorted(dom)}"
        )
    return avg


def lift_2cut_to_3cut(
    h: Hypergraph, c2: Cut, sample: bool = False, trials: int = 32, seed=0
) -> Cut:
    """Open a third part by conditional expectations over per-vertex moves.

    Each vertex independently moving to part 3 with probability 1/3 makes
    a spanning edge rainbow with probability 8/27, so the expected 3-cut
    size is (8/27) times the 2-cut size; the derandomized pass meets that
    expectation.  ``sample=True`` draws the moves at random instead
    (best of ``trials``), kept for cross-validation.
    """
    if any(len(e) != 3 for e in h.edges):
        raise InvalidArity("lift needs a 3-uniform hypergraph")
    if c2.r != 2 or len(c2.assignment) != h.n_vertices:
        raise InvalidParams("expected a 2-cut of h")
    n = h.n_vertices
    z2 = int(cut_metrics(h, c2).size)

    if sample:
        rng = random.Random(f"lift:{seed}")
        best = None
        for _ in range(max(1, trials)):
            moved = {v: rng.random() < 1 / 3 for v in range(n)}
            assignment = tuple(
                3 if moved[v] else c2.assignment[v] for v in range(n)
            )
            cut = Cut(3, assignment)
            size = int(cut_metrics(h, cut).size)
            if best is None or size > best[0]:
                best = (size, cut)
        return best[1]

    # probabilities carried as integers scaled by 27 (denominators are 3^u)
    def rainbow27(e, moved: dict) -> int:
        free = [v for v in e if v not in moved]
        base = 3 ** (3 - len(free))
        total = 0
        for bits in range(1 << len(free)):
            weight = base
            parts = 0
            for i, v in enumerate(free):
                if bits >> i & 1:
                    parts |= 4
                else:
                    weight *= 2
                    parts |= 1 << (c2.assignment[v] - 1)
            for v in e:
                if v in moved:
                    parts |= 4 if moved[v] else 1 << (c2.assignment[v] - 1)
            if parts == 7:
                total += weight
        return total

    inc = h.incidence()
    prob = [rainbow27(e, {}) for e in h.edges]
    expected = sum(prob)
    if expected != 8 * z2:
        raise CertificateError("initial lift expectation != (8/27) * 2-cut size")
    moved: dict[int, bool] = {}
    for v in range(n):
        deltas = []
        for mv in (False, True):
            d = 0
            for ei in inc[v]:
                trial = {u: moved[u] for u in h.edges[ei] if u in moved}
                trial[v] = mv
                d += rainbow27(h.edges[ei], trial) - prob[ei]
            deltas.append(d)
        mv = deltas[1] > deltas[0]  # tie keeps the vertex in its 2-cut part
        moved[v] = mv
        for ei in inc[v]:
            trial = {u: moved[u] for u in h.edges[ei] if u in moved}
            expected -= prob[ei]
            prob[ei] = rainbow27(h.edges[ei], trial)
            expected += prob[ei]
    assignment = tuple(3 if moved[v] else c2.assignment[v] for v in range(n))
    cut = Cut(3, assignment)
    realized = int(cut_metrics(h, cut).size)
    if realized * 27 != expected:
        raise CertificateError("lift bookkeeping mismatch")
    if realized * 27 < 8 * z2:
        raise CertificateError("lift fell below (8/27) * 2-cut size")
    return cut


def dense_subset_cut(h: Hypergraph, w_set, r: int, trials: int, seed) -> Cut:
    """Best of random cuts whose restriction to W is an equitable r-partition."""
    w = sorted(set(w_set))
    if trials < 1:
        raise InvalidParams("trials must be >= 1")
    if len(w) < r:
        raise InvalidParams(f"|W| = {len(w)} < r = {r}")
    rng = random.Random(f"dense-subset:{seed}")
    best = None
    for _ in range(trials):
        shuffled = w[:]
        rng.shuffle(shuffled)
        assignment = [rng.randint(1, r) for _ in range(h.n_vertices)]
        quota = [len(w) // r + (1 if i < len(w) % r else 0) for i in range(r)]
        pos = 0
        for p in range(r):
            for v in shuffled[pos : pos + quota[p]]:
                assignment[v] = p + 1
            pos += quota[p]
        cut = Cut(r, tuple(assignment))
        size = int(cut_metrics(h, cut).size)
        if best is None or size > best[0]:
            best = (size, cut)
    return best[1]
