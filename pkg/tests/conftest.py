"""Shared fixtures and independent brute-force oracles.

The oracles here enumerate assignments directly and never call the
package's own enumeration or probability code, so they can check it.
"""

from fractions import Fraction
from itertools import product

import pytest

from hypercut.core import Hypergraph, build

FANO_LINES = [
    [0, 1, 2],
    [0, 3, 4],
    [0, 5, 6],
    [1, 3, 5],
    [1, 4, 6],
    [2, 3, 6],
    [2, 4, 5],
]


@pytest.fixture
def fano() -> Hypergraph:
    return build(7, FANO_LINES)


@pytest.fixture
def matching12() -> Hypergraph:
    return build(12, [[3 * i, 3 * i + 1, 3 * i + 2] for i in range(4)])


def brute_force_maxcut(h: Hypergraph, r: int) -> int:
    """Exact max r-cut by full enumeration over r^n assignments."""
    full = set(range(1, r + 1))
    best = 0
    for assign in product(range(1, r + 1), repeat=h.n_vertices):
        size = sum(1 for e in h.edges if {assign[v] for v in e} == full)
        if size > best:
            best = size
    return best


def brute_expected_size(h: Hypergraph, fixed: dict, r: int, free_parts=None) -> Fraction:
    """Average cut size over all completions of ``fixed``, enumerated directly.

    Free vertices range over {1..free_parts} (default: all r parts).
    """
    base = r if free_parts is None else free_parts
    free = [v for v in range(h.n_vertices) if v not in fixed]
    full = set(range(1, r + 1))
    total = 0
    count = 0
    for completion in product(range(1, base + 1), repeat=len(free)):
        assign = dict(fixed)
        assign.update(zip(free, completion))
        total += sum(1 for e in h.edges if {assign[v] for v in e} == full)
        count += 1
    return Fraction(total, count)
