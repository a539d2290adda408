import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from bfan.cube import BooleanFunction, IndexSet, and_, or_
from bfan.errors import BadParameters
from bfan.families import (
    Packing,
    coverage_stats,
    default_block_size,
    greedy_packing,
    hypertribe,
    packing_is_valid,
    tribes,
)


def brute_coverage(p):
    covered = {s for s in combinations(range(1, p.n + 1), p.d) if any(set(s) <= set(b.indices()) for b in p.blocks)}
    return len(covered)


def test_small_packing_reaches_four_blocks():
    best = max((greedy_packing(6, 3, 2, seed=s) for s in range(100)), key=lambda p: len(p.blocks))
    assert len(best.blocks) == 4
    assert packing_is_valid(best)
    stats = coverage_stats(best)
    assert (stats.covered_d_sets, stats.total_d_sets) == (12, 15) == (brute_coverage(best), 15)


def test_packing_edge_cases():
    p = greedy_packing(5, 5, 2, seed=3)
    assert p.block_indices() == [[1, 2, 3, 4, 5]]
    assert coverage_stats(p).coverage_ratio == 1
    with pytest.raises(BadParameters):
        greedy_packing(5, 1, 2)
    empty = Packing(6, 3, 2, ())
    assert coverage_stats(empty).covered_d_sets == 0
    full = Packing(6, 6, 2, (IndexSet.full(6),))
    assert coverage_stats(full).covered_d_sets == math.comb(6, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 12), st.integers(1, 4), st.integers(0, 2**32))
def test_greedy_packing_is_d_set_disjoint(n, d, seed):
    assume(d <= n)
    k = min(n, d + 2)
    p = greedy_packing(n, k, d, seed=seed)
    assert packing_is_valid(p)
    for a, b in combinations(p.blocks, 2):
        assert len(set(a.indices()) & set(b.indices())) <= d - 1
    assert coverage_stats(p).covered_d_sets == brute_coverage(p)
    assert greedy_packing(n, k, d, seed=seed) == p


def test_lexicographic_packing():
    p = greedy_packing(6, 3, 2, lexicographic=True)
    assert sorted(p.block_indices())[0] == [1, 2, 3]
    assert packing_is_valid(p)


def test_packing_json_round_trip():
    p = greedy_packing(10, 4, 2, seed=5)
    assert Packing.from_json(p.to_json()) == p


def test_tribes_examples():
    f = tribes(4, 2)
    expected = BooleanFunction.from_callable(4, lambda x: 1 if (x[0] == x[1] == 1) or (x[2] == x[3] == 1) else -1)
    assert f == expected
    assert Fraction(int(np.count_nonzero(f.table)), 16) == Fraction(7, 16)
    assert tribes(5, 5) == and_(5)
    assert tribes(5, 1) == or_(5)
    with pytest.raises(BadParameters):
        tribes(5, 2)


def test_block_size_formula():
    assert default_block_size(16, 2)[:2] == (4, 4.0)
    assert default_block_size(256, 2)[:2] == (10, 10.0)
    k, exact, rounded = default_block_size(100, 2)
    assert k == round(exact) and rounded


def test_hypertribe_16():
    spec, pw = hypertribe(16, 2, seed=7)
    assert spec.k == 4 and packing_is_valid(spec.packing)
    f = spec.function
    assert f is not None
    # OR over blocks of AND, evaluated from the definition
    blocks = [b.indices() for b in spec.blocks]
    direct = BooleanFunction.from_callable(16, lambda x: 1 if any(all(x[j - 1] == 1 for j in b) for b in blocks) else -1)
    assert f == direct
    rows = np.arange(1 << 16)
    for j in range(16):
        assert np.all(f.table <= f.table[rows | (1 << j)])  # monotone
    pts = np.where(np.random.default_rng(0).integers(0, 2, (500, 16)) == 1, 1, -1)
    assert np.array_equal(pw.evaluate(pts), np.array([f(tuple(p)) for p in pts]))


def test_hypertribe_large_is_pointwise_only():
    spec, pw = hypertribe(256, 2, seed=1)
    assert spec.k == 10 and spec.function is None
    assert packing_is_valid(spec.packing)


def test_hypertribe_errors():
    with pytest.raises(BadParameters):
        hypertribe(16, 1)
