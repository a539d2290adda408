import math
from fractions import Fraction

import numpy as np
import pytest

import oracles
from conftest import random_function
from bfan.cube import BooleanFunction, IndexSet, and_, constant, dictator, from_truth_table, majority, parity
from bfan.errors import (
    BadDegree,
    DegreeTooHigh,
    DimensionMismatch,
    PreconditionViolated,
    RangeViolation,
    SearchSpaceTooLarge,
    UnknownSuite,
)
from bfan.families import Packing, TribeSpec, hypertribe
from bfan import verify
from bfan.verify import (
    all_functions,
    chain_battery,
    check_degree_lattice,
    check_hypercontractivity,
    check_influence_chain,
    check_integral_identity_fkn,
    check_integral_identity_kkl,
    check_kklprop2_bound,
    check_log_sobolev,
    check_main_theorem,
    fkn_report,
    main_theorem_battery,
    nearest_low_degree,
    run_suite,
    sharpness_report,
    summary_line,
)


def passes_with_consistent_slack(r):
    assert r.passed == (r.slack >= -r.tol)
    return r.passed


def test_main_theorem_examples():
    r = check_main_theorem(majority(3), 2)
    assert passes_with_consistent_slack(r) and r.rhs == Fraction(1, 4)
    assert math.isclose(r.lhs, 0.1 * 0.25 * (math.log(3) / 3) ** 2, rel_tol=1e-12)
    assert r.lhs >= 0.1 * 0.25 * (math.log(3) / 3) ** 2
    r = check_main_theorem(constant(3), 2)
    assert r.passed and r.lhs == 0.0
    r = check_main_theorem(parity(3), 3)
    assert r.passed and r.rhs == 1
    assert check_main_theorem(dictator(1), 1).lhs == 0.0
    with pytest.raises(BadDegree):
        check_main_theorem(parity(3), 4)


def test_main_theorem_battery_agrees_with_single_checks(rng):
    tables = all_functions(3)
    batch = main_theorem_battery(tables, 3)
    assert all(r.passed for r in batch) and sum(r.details["count"] for r in batch) == 256 * 3
    worst = {}
    for code in range(256):
        f = BooleanFunction(3, tables[code])
        for d in (1, 2, 3):
            s = check_main_theorem(f, d).slack
            worst[d] = min(worst.get(d, s), s)
    for r, d in zip(batch, (1, 2, 3)):
        assert math.isclose(r.slack, worst[d], rel_tol=1e-12, abs_tol=1e-15)


def test_chain_examples():
    res = check_influence_chain(dictator(2))
    assert all(passes_with_consistent_slack(r) for r in res)
    pair = [r for r in res if r.instance.endswith("i={1,2}")]
    by = {r.name: r for r in pair}
    assert by["coalition_ge_joint"].rhs == 1 and by["coalition_ge_joint"].lhs == 0
    assert by["joint_ge_t_influence"].lhs == 0
    by = {r.name: r for r in check_influence_chain(and_(2)) if r.instance.endswith("i={1,2}")}
    assert (by["coalition_ge_joint"].rhs, by["coalition_ge_joint"].lhs, by["joint_ge_t_influence"].lhs) == (
        1, 1, Fraction(1, 4))
    assert all(r.passed for r in check_influence_chain(majority(3)))


def test_chain_battery_counts_match_single_checks():
    tables = all_functions(2)
    batch = {r.name: r for r in chain_battery(tables, 2)}
    singles = [r for code in range(16) for r in check_influence_chain(BooleanFunction(2, tables[code]))]
    for name, r in batch.items():
        mine = [s for s in singles if s.name == name]
        assert r.details["count"] == len(mine)
        assert r.details["failures"] == 0 == sum(not s.passed for s in mine)
        assert math.isclose(r.slack, min(s.slack for s in mine), abs_tol=1e-15)


def test_kkl_identity_examples():
    for d in (1, 2):
        r = check_integral_identity_kkl(majority(3), d)
        assert passes_with_consistent_slack(r) and r.slack == 0
    assert check_integral_identity_kkl(majority(3), 1).lhs == 1
    assert check_integral_identity_kkl(majority(3), 2).lhs == Fraction(1, 4)
    assert check_integral_identity_kkl(constant(3), 2).rhs == 0
    with pytest.raises(BadDegree):
        check_integral_identity_kkl(majority(3), 4)


def test_fkn_identity_examples():
    r = check_integral_identity_fkn(majority(3), IndexSet.of(3, 1))
    assert r.passed and r.lhs == Fraction(1, 4)
    r = check_integral_identity_fkn(dictator(3), IndexSet(0, 3))
    assert r.passed and r.lhs == 1
    with pytest.raises(DimensionMismatch):
        check_integral_identity_fkn(parity(3), IndexSet.full(3))


def test_identity_sides_against_definitions(rng):
    f = random_function(4, rng)
    fv = oracles.values(f)
    for d in (1, 2, 3):
        lhs, exact, numeric = verify.kkl_identity_sides(f, d)
        assert lhs == oracles.weight_at_least(fv, 4, d) == exact
        assert abs(numeric - float(exact)) < 1e-9


def test_hypercontractive_integral_examples():
    r = check_kklprop2_bound(majority(3), IndexSet.of(3, 1), 1, 1)
    # (1/2) int_0^1 (1/4 + u^2/4) du = 1/6, from the spectrum 1/2 - x2 x3 / 2 of d_1 Maj3
    assert math.isclose(r.lhs, 1 / 6, rel_tol=1e-10)
    assert math.isclose(r.rhs, 0.5 / math.log(2), rel_tol=1e-14) and r.passed
    r = check_kklprop2_bound(dictator(2), IndexSet.of(2, 1, 2), 2, 1)
    assert r.lhs == 0 and r.rhs == 0 and r.passed
    r = check_kklprop2_bound(parity(3), IndexSet.of(3, 1), 1, 1)
    assert r.rhs == math.inf and r.passed
    with pytest.raises(PreconditionViolated):
        check_kklprop2_bound(majority(3), IndexSet.of(3, 1), 1, 2)
    with pytest.raises(PreconditionViolated):
        check_kklprop2_bound(and_(2), IndexSet.of(2, 1, 2), 1, 1)  # values 1/2 not in Z


def test_hypercontractive_integral_matches_time_integral():
    # integrate in t directly with a crude fine grid
    f = majority(3)
    i = IndexSet.of(3, 1)
    from bfan.calculus import derivative_pointwise, heat

    spec = derivative_pointwise(f, i).spectrum()
    ts = np.linspace(0, 20, 200001)
    vals = np.array([heat(spec, t).squared_norm() for t in ts[::100]])
    grid = ts[::100]
    approx = np.trapezoid(np.exp(-2 * grid) * vals, grid)
    assert abs(approx - verify.hypercontractive_integral(f, i, 1)) < 1e-4


def test_hypercontractivity_examples(rng):
    for t in (0.0, 0.5, 3.0):
        r = check_hypercontractivity(dictator(3), t)
        assert r.passed and math.isclose(r.lhs, math.exp(-t)) and r.rhs == 1.0
    r = check_hypercontractivity(random_function(5, rng), 0.0)
    assert r.passed and abs(r.slack) < 1e-15
    assert check_hypercontractivity(random_function(6, rng), 0.5).passed


def test_log_sobolev_examples():
    h = dictator(3).table.astype(int)
    r = check_log_sobolev(h)
    assert r.rhs == Fraction(1, 4) and math.isclose(r.lhs, 0.25 * math.log(2)) and r.passed
    assert check_log_sobolev(np.zeros(8, dtype=int)).slack == 0
    r = check_log_sobolev(np.ones(8, dtype=int))
    assert r.lhs == 0.0 and r.passed
    with pytest.raises(RangeViolation):
        check_log_sobolev(np.array([0, 1, 2, 1]))


def test_log_sobolev_total_influence_by_definition(rng):
    h = rng.integers(0, 2, 32)
    pts = oracles.points(5)
    hv = {x: int(h[oracles.row_of(x)]) for x in pts}
    tot = sum(oracles.derivative(hv, [j], x) ** 2 for x in pts for j in range(1, 6)) / Fraction(32)
    assert verify.zero_one_total_influence(h) == tot


def test_degree_lattice_examples():
    r = check_degree_lattice(and_(2), 2)
    assert r.passed and r.lhs == 4 and r.rhs == 4
    r = check_degree_lattice(dictator(3), 1)
    assert r.passed and r.lhs == 1
    r = check_degree_lattice(majority(3), 3)
    assert r.passed and r.lhs == 4 and r.rhs == 16
    with pytest.raises(DegreeTooHigh):
        check_degree_lattice(majority(3), 2)


def test_nearest_examples():
    pd = from_truth_table([1, 1, 0, 1], 2)  # dictator x1 with row 0 flipped
    res = nearest_low_degree(pd, 1)
    assert res.g == dictator(2) and res.distance_sq == 1 and not res.is_unique
    assert set(res.coeff_deviations) == {0, 1, 2}
    assert nearest_low_degree(majority(3), 3).distance_sq == 0
    res = nearest_low_degree(and_(2), 1)
    assert res.candidates == 6 and res.distance_sq == 1
    with pytest.raises(SearchSpaceTooLarge):
        nearest_low_degree(random_function(10, np.random.default_rng(0)), 2)


def test_nearest_matches_plain_enumeration(rng):
    for n in (1, 2, 3):
        for d in range(1, n + 1):
            for _ in range(4):
                f = random_function(n, rng)
                winners, dist = oracles.nearest_low_degree(f, d)
                res = nearest_low_degree(f, d)
                assert res.distance_sq == dist
                assert tuple(int(b) for b in res.g.table) == winners[0]
                assert res.is_unique == (len(winners) == 1)


def test_lattice_route_matches_exhaustive(rng):
    for n in (2, 3, 4):
        for d in (1, 2):
            f = random_function(n, rng)
            a = nearest_low_degree(f, d)
            b = nearest_low_degree(f, d, method="lattice")
            assert (a.g, a.distance_sq, a.is_unique) == (b.g, b.distance_sq, b.is_unique)
    f = random_function(6, rng)
    res = nearest_low_degree(f, 1, lattice=True)
    assert res.method == "lattice" and res.candidates == 14


def test_fkn_report():
    rep = fkn_report(from_truth_table([1, 1, 0, 1], 2), 1)
    assert [r["set"] for r in rep["ratios"]] == [[], [1], [2]]
    assert rep["alpha_star"] > 0
    rep = fkn_report(and_(3), 3 - 1)
    rep = fkn_report(majority(3), 2)
    assert all(r["deviation"]["float"] >= 0 for r in rep["ratios"])
    low = fkn_report(dictator(3), 1)
    assert all(r["deviation"]["float"] == 0 and r["ratio"] == 0.0 for r in low["ratios"])
    with pytest.raises(BadDegree):
        fkn_report(and_(2), 2)


def test_sharpness_exact_and_degenerate():
    spec, _ = hypertribe(16, 2, seed=7)
    rep = sharpness_report(spec, 2)
    assert rep["mode"] == "exact" and 0 < rep["ratio"] < math.inf
    empty = Packing(8, 3, 2, ())
    dead = TribeSpec(8, 3, 2, 0, empty, function=BooleanFunction(8, np.zeros(256, dtype=bool)))
    rep = sharpness_report(dead, 2)
    assert rep["ratio"] is None and rep["ratio_undefined"]
    assert rep["max_joint_influence"]["float"] == 0.0


def test_suite_dispatch():
    with pytest.raises(UnknownSuite):
        run_suite("bogus")
    res = run_suite("log-sobolev", 2)
    assert summary_line("log-sobolev", res) == "suite=log-sobolev pass=20/20"
