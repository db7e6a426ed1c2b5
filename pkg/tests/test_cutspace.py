import math
import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from hypercut.core import build
from hypercut.cutspace import (
    Cut,
    PartialCut,
    cut_metrics,
    equitable_complete_value,
    expected_fraction,
    multicolour_probability,
    partial_average_excess,
    stirling2,
    theorem_bound,
    theorem_bound_claim,
)
from hypercut.errors import InvalidCut, InvalidParams

from conftest import brute_expected_size, brute_force_maxcut


def test_expected_fraction_known_values():
    assert expected_fraction(3, 2) == Fraction(3, 4)
    assert expected_fraction(3, 3) == Fraction(6, 27)
    assert expected_fraction(4, 2) == Fraction(7, 8)
    for k in range(2, 9):
        assert expected_fraction(k, 2) == 1 - Fraction(2, 2**k)
        assert expected_fraction(k, k) == Fraction(math.factorial(k), k**k)


def test_expected_fraction_rejects_bad_params():
    for k, r in [(3, 4), (3, 1), (2, 0)]:
        with pytest.raises(InvalidParams):
            expected_fraction(k, r)


def test_stirling_base_cases():
    assert stirling2(0, 0) == 1
    assert stirling2(5, 1) == 1
    assert stirling2(4, 2) == 7
    assert stirling2(4, 5) == 0


def _enumerate_multicolour(hit, free, r, base=None):
    """Direct enumeration oracle for the completion probability."""
    base = r if base is None else base
    good = 0
    for completion in product(range(1, base + 1), repeat=free):
        if set(hit) | set(completion) == set(range(1, r + 1)):
            good += 1
    return Fraction(good, base**free)


def test_multicolour_probability_examples():
    assert multicolour_probability(3, (), 3, 2) == Fraction(3, 4)
    assert multicolour_probability(3, {3}, 2, 3) == Fraction(2, 9)
    assert multicolour_probability(4, {1, 2, 3}, 1, 3) == Fraction(1)
    assert multicolour_probability(2, (), 2, 3) == 0  # too small to span 3 parts


def test_multicolour_probability_against_enumeration():
    for r in (2, 3, 4):
        for size in range(1, 6):
            for hit_count in range(0, r + 1):
                hit = set(range(1, hit_count + 1))
                for free in range(0, size - hit_count + 1):
                    got = multicolour_probability(size, hit, free, r)
                    assert got == _enumerate_multicolour(hit, free, r)


def test_multicolour_probability_restricted_support():
    # free vertices uniform over {1,2} only
    for size, hit, free in [(4, {3}, 3), (3, {3}, 2), (5, {3, 4}, 2)]:
        r = max(hit)
        got = multicolour_probability(size, hit, free, r, free_parts=2)
        assert got == _enumerate_multicolour(hit, free, r, base=2)
    assert multicolour_probability(4, set(), 4, 3, free_parts=2) == 0


def test_multicolour_monotone_in_hits():
    for r in (2, 3, 4):
        for free in range(0, 4):
            probs = [
                multicolour_probability(free + j, set(range(1, j + 1)), free, r)
                for j in range(r + 1)
            ]
            assert all(a <= b for a, b in zip(probs, probs[1:]))


def test_cut_metrics_fano(fano):
    cut = Cut(2, (1, 1, 1, 1, 2, 2, 2))
    # independent recount: edges meeting both sides of {0,1,2,3} | {4,5,6}
    direct = sum(
        1 for e in fano.edges if any(v <= 3 for v in e) and any(v >= 4 for v in e)
    )
    got = cut_metrics(fano, cut)
    assert direct == 6
    assert got.size == 6
    assert got.expected == Fraction(21, 4)
    assert got.excess == Fraction(3, 4)


def test_cut_metrics_matching(matching12):
    cut = Cut(2, (1, 1, 2) * 4)
    got = cut_metrics(matching12, cut)
    assert got.size == 4
    assert got.excess == Fraction(1)


def test_cut_metrics_monochromatic(fano):
    assert cut_metrics(fano, Cut(2, (1,) * 7)).size == 0


def test_cut_metrics_rejects_mismatch(fano):
    with pytest.raises(InvalidCut):
        cut_metrics(fano, Cut(2, (1, 2)))


def test_partial_average_excess_determined_edge():
    h = build(4, [[0, 1, 2, 3]])
    pc = PartialCut(2, {0: 1, 1: 2})
    assert partial_average_excess(h, pc) == 1 - Fraction(7, 8)


def test_partial_average_excess_empty(fano):
    assert partial_average_excess(fano, PartialCut(2, {})) == 0


def test_partial_average_excess_brute():
    h = build(4, [[0, 1, 2, 3]])
    pc = PartialCut(2, {0: 1, 1: 2})
    brute = brute_expected_size(h, pc.assigned, 2) - brute_expected_size(h, {}, 2)
    assert partial_average_excess(h, pc) == brute == Fraction(1, 8)


def test_partial_average_excess_full_assignment_matches_metrics(fano):
    rng = random.Random(7)
    for _ in range(5):
        assign = tuple(rng.choice((1, 2)) for _ in range(7))
        pc = PartialCut(2, dict(enumerate(assign)))
        metrics = cut_metrics(fano, Cut(2, assign))
        assert partial_average_excess(fano, pc) == metrics.excess


def test_theorem_bound_examples():
    assert theorem_bound("sts-2cut", m=7) == Fraction(3, 4)
    assert theorem_bound("mixed-2cut-n", k=3, n=12) == Fraction(1)
    assert theorem_bound("connected-3graph", n=9) == Fraction(1)
    assert theorem_bound("mixed-k-edges", k=4, n=32) == Fraction(32, 64)
    assert theorem_bound("graph-2cut-m", m=1) == Fraction(1, 4)
    assert isinstance(theorem_bound("sts-2cut", m=8), float)


def test_theorem_bound_errors():
    with pytest.raises(InvalidParams):
        theorem_bound("no-such-bound")
    with pytest.raises(InvalidParams):
        theorem_bound("sts-2cut", n=9)
    assert "3-graph" in theorem_bound_claim("sts-2cut")


def test_equitable_complete_small():
    assert equitable_complete_value(5, 2, 2) == 6
    assert equitable_complete_value(4, 3, 3) == 2


def complete_hypergraph(n, k):
    from itertools import combinations

    return build(n, [list(c) for c in combinations(range(n), k)])


@pytest.mark.parametrize("n,k,r", [(4, 3, 3), (5, 3, 2), (6, 3, 3), (5, 4, 2), (6, 2, 2)])
def test_equitable_complete_matches_brute_force(n, k, r):
    assert equitable_complete_value(n, k, r) == brute_force_maxcut(
        complete_hypergraph(n, k), r
    )


def test_monte_carlo_expected_size(fano):
    rng = random.Random(11)
    trials = 4000
    sizes = []
    for _ in range(trials):
        cut = Cut(2, tuple(rng.choice((1, 2)) for _ in range(7)))
        sizes.append(int(cut_metrics(fano, cut).size))
    mean = sum(sizes) / trials
    var = sum((s - mean) ** 2 for s in sizes) / (trials - 1)
    sigma = (var / trials) ** 0.5
    assert abs(mean - 21 / 4) <= 3 * sigma + 1e-9


@settings(max_examples=60)
@given(st.integers(min_value=2, max_value=7), st.integers(min_value=2, max_value=4))
def test_expected_fraction_matches_inclusion_exclusion(k, r):
    if r > k:
        return
    assert expected_fraction(k, r) == multicolour_probability(k, (), k, r)


@st.composite
def tiny_instances_with_partials(draw):
    n = draw(st.integers(min_value=2, max_value=6))
    m = draw(st.integers(min_value=1, max_value=6))
    edges = []
    for _ in range(m):
        size = draw(st.integers(min_value=1, max_value=n))
        edges.append(
            draw(
                st.lists(
                    st.integers(min_value=0, max_value=n - 1),
                    min_size=size,
                    max_size=size,
                    unique=True,
                )
            )
        )
    r = draw(st.integers(min_value=2, max_value=3))
    assign = draw(st.lists(st.integers(min_value=1, max_value=r), min_size=n, max_size=n))
    return build(n, edges), r, tuple(assign)


@settings(max_examples=80)
@given(tiny_instances_with_partials())
def test_full_partial_cut_matches_metrics_property(data):
    h, r, assign = data
    metrics = cut_metrics(h, Cut(r, assign))
    pc = PartialCut(r, dict(enumerate(assign)))
    assert partial_average_excess(h, pc) == metrics.excess


@settings(max_examples=60)
@given(tiny_instances_with_partials())
def test_partial_average_matches_enumeration_property(data):
    h, r, assign = data
    fixed = {v: p for v, p in enumerate(assign) if v % 2 == 0}
    pc = PartialCut(r, fixed)
    brute = brute_expected_size(h, fixed, r) - brute_expected_size(h, {}, r)
    assert partial_average_excess(h, pc) == brute


def test_weighted_cut_metrics():
    from hypercut.core import WeightedGraph
    from hypercut.cutspace import weighted_cut_metrics

    wg = WeightedGraph(
        3, ((0, 1, Fraction(1, 4)), (0, 2, Fraction(1, 2)), (1, 2, Fraction(1)))
    )
    got = weighted_cut_metrics(wg, Cut(2, (1, 2, 2)))
    assert got.size == Fraction(3, 4)
    assert got.expected == Fraction(7, 8)
    assert got.excess == Fraction(-1, 8)
    with pytest.raises(InvalidCut):
        weighted_cut_metrics(wg, Cut(3, (1, 2, 3)))
