import random
from fractions import Fraction

import pytest

from hypercut.core import build
from hypercut.cutspace import Cut, PartialCut, cut_metrics, partial_average_size
from hypercut.derand import greedy_order_cut
from hypercut.errors import (
    InvalidArity,
    InvalidExposure,
    InvalidParams,
    InvalidReduction,
)
from hypercut.reductions import (
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

from conftest import brute_expected_size, brute_force_maxcut
from test_derand import random_mixed


# ------------------------------------------------------------- expand_3graph


def test_expand_matching(matching12):
    red = expand_3graph(matching12)
    assert red.forward.m == 12  # four disjoint triangles
    cut = red.back_map(Cut(2, (1, 1, 2) * 4))
    assert cut_metrics(matching12, cut).size == 4
    assert sum(m for u, v, m in red.forward.pairs if cut.assignment[u] != cut.assignment[v]) == 8


def test_expand_fano_complete(fano):
    red = expand_3graph(fano)
    assert red.forward.m == 21
    assert all(m == 1 for _, _, m in red.forward.pairs)


def test_expand_single_edge():
    h = build(3, [[0, 1, 2]])
    red = expand_3graph(h)
    cut = red.back_map(Cut(2, (1, 1, 2)))
    assert cut_metrics(h, cut).size == 1


def test_expand_rejects_mixed():
    with pytest.raises(InvalidArity):
        expand_3graph(build(3, [[0, 1]]))


def test_expand_random_certificates():
    rng = random.Random(4)
    for _ in range(20):
        n = rng.randint(3, 9)
        h = build(n, [rng.sample(range(n), 3) for _ in range(rng.randint(1, 12))])
        red = expand_3graph(h)
        cut = Cut(2, tuple(rng.choice((1, 2)) for _ in range(n)))
        red.back_map(cut)  # raises on any size mismatch


# --------------------------------------------------------------- rgraph


def test_rgraph_four_edge():
    h = build(4, [[0, 1, 2, 3]])
    red = rgraph_expand(h, 3)
    assert red.forward.m == 4
    # parts (2+1+1): exactly two of the four triples are rainbow
    cut = red.back_map(Cut(3, (1, 1, 2, 3)))
    assert cut_metrics(red.forward, cut).size == 2
    assert cut_metrics(h, cut).size == 1


def test_rgraph_monochromatic():
    h = build(4, [[0, 1, 2, 3]])
    red = rgraph_expand(h, 3)
    cut = red.back_map(Cut(3, (1, 1, 1, 1)))
    assert cut_metrics(red.forward, cut).size == 0


def test_rgraph_rejects_bad_r():
    h = build(4, [[0, 1, 2, 3]])
    with pytest.raises(InvalidParams):
        rgraph_expand(h, 2)


def test_rgraph_random_certificates():
    rng = random.Random(6)
    for _ in range(15):
        n = rng.randint(5, 9)
        k = rng.choice((4, 5))
        h = build(n, [rng.sample(range(n), k) for _ in range(rng.randint(1, 8))])
        red = rgraph_expand(h, k - 1)
        cut = Cut(k - 1, tuple(rng.randint(1, k - 1) for _ in range(n)))
        red.back_map(cut)


# --------------------------------------------------------------- hpart_expose


def test_hpart_expose_pair_edge():
    h = build(3, [[0, 1, 2]])
    red = hpart_expose(h, 3, {2: 3}, keep=2)
    assert red.forward.edges == ((0, 1),)
    cut = red.back_map(Cut(2, (1, 2, 1)))
    assert cut.assignment == (1, 2, 3)
    assert cut_metrics(h, cut).size == 1


def test_hpart_expose_mixed_arity():
    h = build(6, [[0, 1, 2, 3, 4]])
    red = hpart_expose(h, 4, {3: 3, 4: 4}, keep=2)
    assert red.forward.edges == ((0, 1, 2),)
    assert red.forward.max_arity == 5 - 4 + 2


def test_hpart_expose_drops_uncovered():
    h = build(3, [[0, 1, 2]])
    red = hpart_expose(h, 3, {}, keep=2)  # part 3 unreachable
    assert red.forward.m == 0


def test_hpart_expose_rejects_bad_rho():
    h = build(3, [[0, 1, 2]])
    with pytest.raises(InvalidExposure):
        hpart_expose(h, 3, {0: 1}, keep=2)


def test_hpart_expose_keep3():
    h = build(5, [[0, 1, 2, 3], [1, 2, 3, 4]])
    red = hpart_expose(h, 4, {0: 4, 4: 4}, keep=3)
    assert red.forward.edges == ((1, 2, 3), (1, 2, 3))
    cut = red.back_map(Cut(3, (1, 1, 2, 3, 1)))
    assert cut.assignment == (4, 1, 2, 3, 4)
    assert cut_metrics(h, cut).size == 2


def test_hpart_expose_same_size_random():
    rng = random.Random(8)
    for _ in range(20):
        h = random_mixed(rng, n_hi=9, m_hi=12, k_hi=5)
        k = h.max_arity
        if k < 3:
            continue
        r = rng.randint(3, k)
        rho = {v: rng.randint(3, r) for v in range(h.n_vertices) if rng.random() < 0.4}
        red = hpart_expose(h, r, rho, keep=2)
        cut = Cut(2, tuple(rng.choice((1, 2)) for _ in range(h.n_vertices)))
        red.back_map(cut)  # certificate asserts the same-size relation


def test_exposure_average_excess_unbiased():
    # averaged over exposures, conditional expectation reproduces E Z (3 sigma)
    rng = random.Random(10)
    h = build(6, [[0, 1, 2], [1, 2, 3], [2, 3, 4], [3, 4, 5]])
    samples = []
    for _ in range(3000):
        rho = {}
        for v in range(6):
            roll = rng.randint(1, 3)
            if roll == 3:
                rho[v] = 3
        samples.append(float(exposure_average_excess(h, 3, rho, keep=2)))
    mean = sum(samples) / len(samples)
    var = sum((s - mean) ** 2 for s in samples) / (len(samples) - 1)
    assert abs(mean) <= 3 * (var / len(samples)) ** 0.5 + 1e-9


# --------------------------------------------------------------- hpart_double


def test_hpart_double_shapes():
    h = build(6, [[0, 1, 2], [0, 1, 4], [3, 4, 5], [0, 4, 5]])
    w = {0, 1, 2}
    red = hpart_double(h, w, {3: 1, 4: 1, 5: 2})
    # edge {0,1,2} inside W doubles; {0,1,4} has one-sided outside part -> stub (0,1)
    # {3,4,5} outside-two-parts is determined multicoloured; {0,4,5} determined too
    assert sorted(red.forward.edges) == [(0, 1), (0, 1, 2), (0, 1, 2)]
    assert red.n_multi == 2
    assert red.n_undetermined == 1


def test_hpart_double_rejects_partial_rho():
    h = build(3, [[0, 1, 2]])
    with pytest.raises(InvalidExposure):
        hpart_double(h, {0, 1}, {})


def test_hpart_double_excess_transfer_random():
    rng = random.Random(12)
    for _ in range(25):
        h = random_mixed(rng, n_hi=8, m_hi=10, k_hi=4)
        w = {v for v in range(h.n_vertices) if rng.random() < 0.6}
        rho = {v: rng.choice((1, 2)) for v in range(h.n_vertices) if v not in w}
        red = hpart_double(h, w, rho)
        phi = Cut(2, tuple(rng.choice((1, 2)) for _ in range(h.n_vertices)))
        best = red.back_map(phi)  # averaging + transfer certificates run inside
        x_fwd = cut_metrics(red.forward, phi).excess
        realized = cut_metrics(h, best).excess
        assert realized >= x_fwd / 2 + (red.conditional_size - red.base_size)


# --------------------------------------------------------------- weighted


def test_weighted_reduce_formula():
    h = build(6, [[0, 1, 2, 3], [0, 1, 4], [2, 4, 5]])
    wg = weighted_reduce(h, {0, 1})
    assert wg.weights == ((0, 1, Fraction(1, 4) + Fraction(1, 2)),)


def test_weighted_reduce_rejects_triple_meet():
    h = build(4, [[0, 1, 2]])
    with pytest.raises(InvalidReduction):
        weighted_reduce(h, {0, 1, 2})


def test_weighted_identity_exhaustive_small():
    h = build(5, [[0, 1, 2], [0, 1, 3, 4], [2, 3, 4], [0, 2]])
    vp = {0, 2}
    wg = weighted_reduce(h, vp)
    for a in (1, 2):
        for b in (1, 2):
            omega = {0: a, 2: b}
            avg = weighted_identity_check(h, wg, omega)
            brute = brute_expected_size(h, omega, 2) - brute_expected_size(h, {}, 2)
            assert avg == brute


def test_weighted_identity_random_batch():
    rng = random.Random(14)
    checked = 0
    while checked < 200:
        h = random_mixed(rng, n_hi=10, m_hi=14, k_hi=6)
        vp = set(rng.sample(range(h.n_vertices), min(h.n_vertices, rng.randint(1, 4))))
        if any(sum(v in vp for v in e) > 2 for e in h.edges):
            continue
        wg = weighted_reduce(h, vp)
        omega = {v: rng.choice((1, 2)) for v in vp}
        weighted_identity_check(h, wg, omega)
        checked += 1


# --------------------------------------------------------------- lift


def test_lift_matching(matching12):
    c2 = Cut(2, (1, 1, 2) * 4)
    c3 = lift_2cut_to_3cut(matching12, c2)
    assert int(cut_metrics(matching12, c3).size) >= 2  # ceil(32/27)


def test_lift_monochromatic():
    h = build(4, [[0, 1, 2], [1, 2, 3]])
    c3 = lift_2cut_to_3cut(h, Cut(2, (1, 1, 1, 1)))
    assert int(cut_metrics(h, c3).size) >= 0


def test_lift_sts9_bound():
    # 2-cut of size 10 lifts to a 3-cut of size >= ceil(80/27) = 3
    from hypercut.instances import generate, GenSpec

    h = generate(GenSpec(family="sts", n=9))
    best = None
    from itertools import product

    for assign in product((1, 2), repeat=9):
        size = int(cut_metrics(h, Cut(2, assign)).size)
        if best is None or size > best[0]:
            best = (size, Cut(2, assign))
    assert best[0] == 10
    c3 = lift_2cut_to_3cut(h, best[1])
    assert int(cut_metrics(h, c3).size) >= 3


def test_lift_beats_guarantee_random():
    rng = random.Random(16)
    for _ in range(15):
        n = rng.randint(3, 9)
        h = build(n, [rng.sample(range(n), 3) for _ in range(rng.randint(1, 10))])
        c2 = Cut(2, tuple(rng.choice((1, 2)) for _ in range(n)))
        z2 = cut_metrics(h, c2).size
        c3 = lift_2cut_to_3cut(h, c2)
        assert cut_metrics(h, c3).size >= Fraction(8, 27) * z2


def test_lift_sampling_flag(matching12):
    c2 = Cut(2, (1, 1, 2) * 4)
    c3 = lift_2cut_to_3cut(matching12, c2, sample=True, trials=64, seed=5)
    assert c3.r == 3


# --------------------------------------------------------------- dense subset


def test_dense_subset_complete_9():
    from itertools import combinations

    h = build(9, [list(c) for c in combinations(range(9), 3)])
    cut = dense_subset_cut(h, range(9), 2, trials=24, seed=3)
    from hypercut.cutspace import equitable_complete_value

    size = int(cut_metrics(h, cut).size)
    assert size == equitable_complete_value(9, 3, 2)  # equitable samples hit the optimum


def test_dense_subset_rejects_zero_trials(fano):
    with pytest.raises(InvalidParams):
        dense_subset_cut(fano, range(7), 2, trials=0, seed=1)


def test_dense_subset_no_edges():
    h = build(6, [[0, 1, 2]])
    cut = dense_subset_cut(h, {3, 4, 5}, 3, trials=4, seed=2)
    assert cut.r == 3
