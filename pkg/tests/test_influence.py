from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import random_function
from bfan.cube import IndexSet, and_, constant, dictator, from_truth_table, fwht, majority, parity
from bfan.errors import BadDegree, EmptySet, IndexNotInSet
from bfan.influence import (
    all_t_influences,
    coalition_counts,
    coalition_influence,
    influence_report,
    is_pivotal,
    joint_counts,
    joint_influence,
    max_influence,
    nonzero_derivative_counts,
    nonzero_derivative_prob,
    t_influence,
    total_influence,
)

I12 = IndexSet.of(3, 1, 2)


def test_t_influence_examples():
    assert t_influence(fwht(parity(3)), I12) == 1
    assert t_influence(fwht(majority(3)), I12) == Fraction(1, 4)
    assert t_influence(fwht(dictator(3)), I12) == 0
    assert t_influence(fwht(majority(3)), IndexSet(0, 3)) == 1


def test_pivotal_examples():
    assert is_pivotal(majority(3), I12, 1, (-1, -1, 1))
    assert not any(is_pivotal(dictator(3), I12, 2, x) for x in oracles.points(3))
    assert all(is_pivotal(parity(3), IndexSet.of(3, 1), 1, x) for x in oracles.points(3))
    with pytest.raises(IndexNotInSet):
        is_pivotal(majority(3), I12, 3, (1, 1, 1))


def test_joint_and_coalition_examples():
    assert joint_influence(majority(3), I12) == 1
    assert joint_influence(dictator(3), I12) == 0
    assert joint_influence(and_(2), IndexSet.of(2, 1, 2)) == 1
    assert coalition_influence(dictator(3), I12) == 1
    assert coalition_influence(majority(3), I12) == 1
    assert coalition_influence(constant(3), IndexSet.of(3, 2)) == 0
    for fn in (joint_influence, coalition_influence, nonzero_derivative_prob):
        with pytest.raises(EmptySet):
            fn(majority(3), IndexSet(0, 3))


def test_nonzero_prob_examples():
    assert nonzero_derivative_prob(and_(2), IndexSet.of(2, 1, 2)) == 1
    assert nonzero_derivative_prob(dictator(3), I12) == 0
    assert nonzero_derivative_prob(majority(3), IndexSet.of(3, 1)) == Fraction(1, 2)


def test_total_and_max_influence_examples():
    assert total_influence(fwht(parity(5))) == 5
    assert total_influence(fwht(majority(3))) == Fraction(3, 2)
    assert total_influence(fwht(constant(4))) == 0
    assert max_influence(fwht(majority(3)), 2) == (I12, Fraction(1, 4))
    assert max_influence(fwht(dictator(3)), 1) == (IndexSet.of(3, 1), 1)
    assert max_influence(fwht(parity(3)), 3) == (IndexSet.full(3), 1)
    with pytest.raises(BadDegree):
        max_influence(fwht(parity(3)), 4)


def test_all_notions_match_definitions(rng):
    for n in (1, 2, 3, 4):
        for _ in range(3):
            f = random_function(n, rng)
            fv = oracles.values(f)
            t = fwht(f)
            for m in range(1, 1 << n):
                i = IndexSet(m, n)
                s = i.indices()
                assert t_influence(t, i) == oracles.t_influence(fv, n, s)
                assert joint_influence(f, i) == oracles.joint_influence(fv, n, s)
                assert coalition_influence(f, i) == oracles.coalition_influence(fv, n, s)
                assert nonzero_derivative_prob(f, i) == oracles.nonzero_prob(fv, n, s)
                for x in oracles.points(n)[:4]:
                    for j in s:
                        assert is_pivotal(f, i, j, x) == oracles.pivotal(fv, n, s, j, x)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << (1 << n)) - 1), st.integers(1, (1 << n) - 1))))
def test_chain_property(case):
    n, code, m = case
    f = from_truth_table([(code >> b) & 1 for b in range(1 << n)], n)
    i = IndexSet(m, n)
    r = len(i)
    t = fwht(f)
    inf, jinf, cinf = t_influence(t, i), joint_influence(f, i), coalition_influence(f, i)
    nz = nonzero_derivative_prob(f, i)
    assert cinf >= jinf >= inf
    assert nz >= inf >= nz.halve(2 * r - 2)
    assert inf >= abs(t[i]).halve(r - 1)
    if r <= 2:
        assert jinf == nz


def test_batch_kernels_match_single(rng):
    n = 5
    fs = [random_function(n, rng) for _ in range(6)]
    tables = np.stack([f.table for f in fs])
    for m in (1, 6, 21, 31):
        i = IndexSet(m, n)
        cc = coalition_counts(tables, n, m)
        jc = joint_counts(tables, n, m)
        nz = nonzero_derivative_counts(tables, n, m)
        for k, f in enumerate(fs):
            restr = 1 << (n - len(i))
            assert coalition_influence(f, i) == Fraction(int(cc[k]), restr)
            assert joint_influence(f, i) == Fraction(int(jc[k]), restr)
            assert nonzero_derivative_prob(f, i) == Fraction(int(nz[k]), restr)


def test_all_t_influences_and_report(rng):
    f = random_function(4, rng)
    t = fwht(f)
    scaled = all_t_influences(t)
    for m in range(16):
        assert Fraction(int(scaled[m]), 4 ** 4) == t_influence(t, IndexSet(m, 4))
    rep = influence_report(majority(3), I12).to_json()
    assert rep["set"] == [1, 2] and rep["joint"]["float"] == 1.0 and rep["t_influence"]["float"] == 0.25
