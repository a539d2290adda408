import io
import math

import numpy as np
import pytest

from bfan.cube import IndexSet, constant, dictator, fwht, majority, parity
from bfan.errors import SubcubeTooLarge
from bfan.families import hypertribe, tribes
from bfan.influence import joint_influence, t_influence
from bfan.sampler import (
    CHUNK,
    Moments,
    PointwiseFunction,
    estimate_coefficient,
    estimate_influences_coupled,
    estimate_joint_influence,
    estimate_joint_influences,
    estimate_low_level_weights,
    estimate_sign_probabilities,
    estimate_t_influence,
    write_csv,
)

N = 20_000


def pw(f):
    return PointwiseFunction.from_boolean(f)


def test_coefficient_examples():
    e = estimate_coefficient(pw(parity(3)), IndexSet.full(3), N, 1)
    assert e.value == 1.0 and e.stderr == 0.0
    assert estimate_coefficient(pw(constant(3)), IndexSet.of(3, 1), N, 2).within(0.0)
    assert estimate_coefficient(pw(tribes(4, 2)), IndexSet(0, 4), N, 3).within(-1 / 8)


def test_influence_examples():
    assert estimate_t_influence(pw(majority(3)), IndexSet.of(3, 1, 2), N, 4).within(0.25)
    assert estimate_t_influence(pw(dictator(3)), IndexSet.of(3, 1, 2), N, 5).value == 0.0
    assert estimate_t_influence(pw(parity(3)), IndexSet.of(3, 2), N, 6).value == 1.0
    e = estimate_joint_influence(pw(majority(3)), IndexSet.of(3, 1, 2), N, 7)
    assert e.value == 1.0 and e.stderr == 0.0
    assert estimate_joint_influence(pw(dictator(3)), IndexSet.of(3, 1, 2), N, 8).value == 0.0


def test_sign_probability_examples():
    plus, minus = estimate_sign_probabilities(pw(tribes(4, 2)), N, 9)
    assert plus.within(7 / 16) and plus.value + minus.value == 1.0
    plus, minus = estimate_sign_probabilities(pw(constant(3, -1)), N, 9)
    assert (plus.value, minus.value) == (0.0, 1.0)


def test_stderr_is_sample_std_over_root_n():
    m = Moments.of(np.array([0.0, 1.0, 1.0, 3.0]))
    e = m.estimate(0)
    assert math.isclose(e.stderr, np.std([0, 1, 1, 3], ddof=1) / 2)


def test_welford_merge_matches_numpy(rng):
    data = rng.normal(size=1000)
    m = Moments()
    for part in np.array_split(data, 7):
        m = m.merge(Moments.of(part))
    e = m.estimate(0)
    assert math.isclose(e.value, data.mean(), rel_tol=1e-12)
    assert math.isclose(e.stderr, data.std(ddof=1) / math.sqrt(data.size), rel_tol=1e-10)


def test_determinism_and_thread_independence():
    spec, h = hypertribe(16, 2, seed=3)
    i = IndexSet.of(16, *spec.blocks[0].indices()[:2])
    a = estimate_joint_influence(h, i, 3 * CHUNK + 17, 11)
    b = estimate_joint_influence(h, i, 3 * CHUNK + 17, 11, threads=4)
    c = estimate_joint_influence(h, i, 3 * CHUNK + 17, 11)
    assert a == b == c
    assert estimate_joint_influence(h, i, 3 * CHUNK + 17, 12) != a


def test_coupled_estimates_dominate():
    spec, h = hypertribe(16, 2, seed=5)
    for pair in ([1, 2], spec.blocks[1].indices()[:2]):
        joint, tinf = estimate_influences_coupled(h, IndexSet.from_indices(16, pair), N, 13)
        assert joint.value >= tinf.value


def test_hypertribe_pair_matches_exact():
    spec, h = hypertribe(16, 2, seed=7)
    i = IndexSet.of(16, *spec.blocks[2].indices()[:2])
    exact = float(joint_influence(spec.function, i))
    assert estimate_joint_influence(h, i, 100_000, 21).within(exact)
    exact_t = float(t_influence(fwht(spec.function), i))
    assert estimate_t_influence(h, i, 100_000, 22).within(exact_t)


def test_shared_pool_matches_single_set_estimates():
    spec, h = hypertribe(16, 2, seed=7)
    sets = [IndexSet.of(16, 1, 2), IndexSet.of(16, *spec.blocks[0].indices()[:2])]
    many = estimate_joint_influences(h, sets, N, 30)
    for s, e in zip(sets, many):
        assert e == estimate_joint_influence(h, s, N, 30)


def test_tribe_fast_subcube_matches_generic(rng):
    spec, h = hypertribe(16, 2, seed=9)
    generic = PointwiseFunction(16, h.evaluate)
    pts = np.where(rng.integers(0, 2, (300, 16)) == 1, 1, -1).astype(np.int8)
    for bits in ([0, 1], spec.blocks[0].bits()[:3], [4]):
        assert np.array_equal(h.subcube_values(pts, bits), generic.subcube_values(pts, bits))


def test_low_level_weights_unbiased():
    f = majority(5)
    var, low, high = estimate_low_level_weights(pw(f), 1, 40_000, 3)
    t = fwht(f)
    exact_low = sum(float(t[1 << j]) ** 2 for j in range(5))
    assert var.within(1.0) and low.within(exact_low) and high.within(1.0 - exact_low)


def test_subcube_limit():
    f = PointwiseFunction(24, lambda p: np.ones(len(p), dtype=np.int8))
    with pytest.raises(SubcubeTooLarge):
        estimate_joint_influence(f, IndexSet((1 << 21) - 1, 24), 4, 0)


def test_csv_rows():
    e = estimate_coefficient(pw(parity(2)), IndexSet.full(2), 10, 0)
    buf = io.StringIO()
    write_csv([("coefficient", IndexSet.full(2), e)], buf)
    assert buf.getvalue() == "estimator,set,value,stderr,samples,seed\ncoefficient,1 2,1.0,0.0,10,0\n"
