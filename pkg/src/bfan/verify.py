"""Executable checks of the inequalities and identities about multi-bit influences.

Every check returns a :class:`CheckResult` stated as ``lhs <= rhs`` (or
``lhs == rhs`` for identities).  Exact sides are Dyadic or Fraction values and
are compared exactly; floating sides use the tolerance recorded in the result.

The ``*_battery`` functions run a check over a whole family of functions.
Exhaustive batteries over every function on n <= 4 use the vectorized batch
kernels from :mod:`bfan.influence` and report one aggregated record per group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Optional

import numpy as np

from .calculus import derivative_pointwise, heat
from .cube import (
    BooleanFunction,
    FourierTable,
    IndexSet,
    as_index_set,
    butterfly,
    degree,
    fwht,
    masks_of_size,
    popcounts,
    transform_signs,
    weight_at_least,
)
from .dyadic import Dyadic
from .errors import (
    BadDegree,
    BudgetExhausted,
    DegreeTooHigh,
    DimensionMismatch,
    PreconditionViolated,
    RangeViolation,
    SearchSpaceTooLarge,
    UnknownSuite,
)
from .influence import (
    coalition_counts,
    coalition_influence,
    joint_counts,
    joint_influence,
    max_influence,
    nonzero_derivative_prob,
    signed_subcube_sums,
    superset_sums,
    t_influence,
)
from .quadrature import adaptive_simpson

EXACT_VS_FLOAT_TOL = 1e-12
FLOAT_TOL = 1e-9
QUAD_TOL = 1e-10
QUAD_AGREEMENT = 1e-8
EXHAUSTIVE_MAX_N = 4


def _exact(v) -> bool:
    return isinstance(v, (Dyadic, Fraction, int))


def __dyadics(v) -> Fraction:
    if isinstance(v, Dyadic):
        return v.to_fraction()
    return Fraction(v)


def value_to_json(v):
    if isinstance(v, Dyadic):
        return v.to_json()
    if isinstance(v, Fraction):
        return {"fraction": f"{v.numerator}/{v.denominator}", "float": float(v)}
    if isinstance(v, float):
        if math.isinf(v) or math.isnan(v):
            return str(v)
        return v
    return v


@dataclass
class CheckResult:
    name: str
    instance: str
    lhs: Any
    rhs: Any
    slack: float
    passed: bool
    tol: float
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        doc = {
            "name": self.name,
            "instance": self.instance,
            "lhs": value_to_json(self.lhs),
            "rhs": value_to_json(self.rhs),
            "slack": value_to_json(float(self.slack)),
            "passed": self.passed,
            "tol": self.tol,
        }
        if self.details:
            doc["details"] = {k: value_to_json(v) for k, v in self.details.items()}
        return doc


def compare_le(name, instance, lhs, rhs, tol=0.0, **details) -> CheckResult:
    """Record ``lhs <= rhs``; passes iff rhs - lhs >= -tol."""
    if isinstance(rhs, float) and math.isinf(rhs) and rhs > 0:
        return CheckResult(name, instance, lhs, rhs, math.inf, True, tol, details)
    if _exact(lhs) and _exact(rhs):
        slack = __dyadics(rhs) - __dyadics(lhs)
        passed = slack >= -Fraction(tol)
        return CheckResult(name, instance, lhs, rhs, float(slack), passed, tol, details)
    slack = float(rhs) - float(lhs)
    return CheckResult(name, instance, lhs, rhs, slack, slack >= -tol, tol, details)


def compare_eq(name, instance, lhs, rhs, tol=0.0, **details) -> CheckResult:
    if _exact(lhs) and _exact(rhs):
        diff = abs(__dyadics(rhs) - __dyadics(lhs))
        return CheckResult(name, instance, lhs, rhs, -float(diff), diff <= Fraction(tol), tol, details)
    diff = abs(float(rhs) - float(lhs))
    return CheckResult(name, instance, lhs, rhs, -diff, diff <= tol, tol, details)


def describe(f: BooleanFunction) -> str:
    bits = "".join("1" if b else "0" for b in f.table) if f.n <= 6 else f"<{1 << f.n} rows>"
    return f"n={f.n} tt={bits}"


# ---------------------------------------------------------------- main theorem


def main_theorem_bound(weight: float, n: int, d: int) -> float:
    """Upper bound on the float value of W * (ln n / n)^d / 10, rounding included."""
    if n == 1:
        return 0.0
    raw = weight * (math.log(n) / n) ** d / 10.0
    # a handful of correctly rounded operations: relative error below (d + 5) ulps
    return raw * (1.0 + (d + 8) * 2.0 ** -52) if raw > 0 else 0.0


def check_main_theorem(f: BooleanFunction, d: int) -> CheckResult:
    """MaxInf_d(f) >= W^{>=d}(f) (ln n / n)^d / 10."""
    if not 1 <= d <= f.n:
        raise BadDegree(f"d={d} outside [1, {f.n}]")
    t = fwht(f)
    where, best = max_influence(t, d)
    w = weight_at_least(t, d)
    bound = main_theorem_bound(float(w), f.n, d)
    return compare_le(
        "main_theorem",
        f"{describe(f)} d={d}",
        bound,
        best,
        EXACT_VS_FLOAT_TOL,
        argmax=str(where),
        weight=w,
    )


def all_functions(n: int) -> np.ndarray:
    """Every truth table on n bits, shape (2**(2**n), 2**n); row c is code c, row 0 of the table is its top bit."""
    if n > EXHAUSTIVE_MAX_N:
        raise SearchSpaceTooLarge(f"exhaustive enumeration is limited to n <= {EXHAUSTIVE_MAX_N}")
    size = 1 << n
    codes = np.arange(1 << size, dtype=np.int64)
    shifts = np.arange(size - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts[None, :]) & 1).astype(bool)


def random_tables(n: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    return rng.integers(0, 2, size=(count, 1 << n)).astype(bool)


def _pick(side, k):
    v = side(k) if callable(side) else side[k]
    return float(v) if isinstance(v, np.floating) else int(v) if isinstance(v, np.integer) else v


def _dyadics(nums, exp):
    return lambda k: Dyadic(int(nums[k]), exp)


class _Group:
    """Aggregates many exact comparisons into one record, keeping the worst case."""

    def __init__(self, name, instance, tol=0.0):
        self.name = name
        self.instance = instance
        self.tol = tol
        self.count = 0
        self.failures = 0
        self.worst: Optional[tuple] = None

    def add(self, slack: np.ndarray, lhs, rhs, labels, passed=None):
        slack = np.asarray(slack, dtype=np.float64)
        if passed is None:
            passed = slack >= -self.tol
        self.count += slack.size
        self.failures += int(np.count_nonzero(~passed))
        if slack.size:
            k = int(np.argmin(slack))
            if self.worst is None or slack[k] < self.worst[0]:
                self.worst = (float(slack[k]), _pick(lhs, k), _pick(rhs, k), labels(k))

    def result(self) -> CheckResult:
        slack, lhs, rhs, label = self.worst if self.worst else (0.0, 0, 0, "")
        return CheckResult(
            self.name,
            f"{self.instance}; worst: {label}",
            lhs,
            rhs,
            slack,
            self.failures == 0,
            self.tol,
            {"count": self.count, "failures": self.failures},
        )


def _label(tables, n):
    def at(k, extra=""):
        bits = "".join("1" if b else "0" for b in tables[k])
        return f"n={n} tt={bits}{extra}"

    return at


def _batch_spectra(tables: np.ndarray):
    coeffs = transform_signs(np.where(tables, 1, -1))
    sq = coeffs * coeffs
    return coeffs, sq, superset_sums(sq)


def main_theorem_battery(tables: np.ndarray, n: int) -> list[CheckResult]:
    """Main-theorem check for every table in the batch and every d in [n]."""
    coeffs, sq, inf_scaled = _batch_spectra(tables)
    pc = popcounts(n)
    scale = float(4 ** n)
    label = _label(tables, n)
    out = []
    for d in range(1, n + 1):
        masks = masks_of_size(n, d)
        best = inf_scaled[:, masks].max(axis=1)
        weight = sq[:, pc >= d].sum(axis=1)
        bounds = np.array([main_theorem_bound(w / scale, n, d) for w in weight.tolist()])
        maxinf = best / scale  # exact: small integers over a power of two
        g = _Group("main_theorem", f"all {len(tables)} functions n={n} d={d}", EXACT_VS_FLOAT_TOL)
        g.add(maxinf - bounds, bounds, _dyadics(best, 2 * n),
              lambda k: label(k, f" d={d}"))
        out.append(g.result())
    return out


# ---------------------------------------------------------------- influence chain


def check_influence_chain(f: BooleanFunction) -> list[CheckResult]:
    """CInf >= JInf >= Inf, the derivative-support sandwich and the small-set equivalences."""
    t = fwht(f)
    out = []
    for r in range(1, f.n + 1):
        for mask in masks_of_size(f.n, r):
            i = IndexSet(int(mask), f.n)
            inst = f"{describe(f)} i={i}"
            inf = t_influence(t, i)
            jinf = joint_influence(f, i)
            cinf = coalition_influence(f, i)
            nz = nonzero_derivative_prob(f, i)
            coef = abs(t.coefficient(i))
            out.append(compare_le("coalition_ge_joint", inst, jinf, cinf))
            out.append(compare_le("joint_ge_t_influence", inst, inf, jinf))
            out.append(compare_le("nonzero_prob_ge_t_influence", inst, inf, nz))
            out.append(compare_le("t_influence_ge_scaled_nonzero_prob", inst, nz.halve(2 * r - 2), inf))
            out.append(compare_le("t_influence_ge_scaled_coefficient", inst, coef.halve(r - 1), inf))
            if r <= 2:
                out.append(compare_eq("joint_eq_nonzero_prob", inst, jinf, nz))
            if r == 1:
                j = int(mask)
                rows = np.arange(1 << f.n)
                flips = Dyadic(int(np.count_nonzero(f.table != f.table[rows ^ j])), f.n)
                agree = inf == jinf == cinf == flips
                out.append(
                    CheckResult("single_bit_agreement", inst, inf, flips, 0.0 if agree else -1.0, agree, 0.0)
                )
    return out


def chain_battery(tables: np.ndarray, n: int) -> list[CheckResult]:
    coeffs, sq, inf_scaled = _batch_spectra(tables)
    label = _label(tables, n)
    four_n = 4 ** n
    groups = {
        name: _Group(name, f"all {len(tables)} functions n={n}")
        for name in (
            "coalition_ge_joint",
            "joint_ge_t_influence",
            "nonzero_prob_ge_t_influence",
            "t_influence_ge_scaled_nonzero_prob",
            "t_influence_ge_scaled_coefficient",
            "joint_eq_nonzero_prob",
            "single_bit_agreement",
        )
    }
    rows = np.arange(1 << n)
    for r in range(1, n + 1):
        restr = 1 << (n - r)
        for mask in masks_of_size(n, r):
            mask = int(mask)
            i = IndexSet(mask, n)
            cc = coalition_counts(tables, n, mask)
            jc = joint_counts(tables, n, mask)
            nz = np.count_nonzero(signed_subcube_sums(tables, n, mask), axis=-1)
            s = inf_scaled[:, mask]
            c = np.abs(coeffs[:, mask])
            lab = lambda k, i=i: label(k, f" i={i}")

            # all comparisons are exact integer cross-multiplications scaled to 4**n
            jinf_s = jc * (four_n // restr)
            cinf_s = cc * (four_n // restr)
            nz_s = nz * (four_n // restr)
            groups["coalition_ge_joint"].add((cinf_s - jinf_s) / four_n, _dyadics(jc, n - r), _dyadics(cc, n - r), lab)
            groups["joint_ge_t_influence"].add((jinf_s - s) / four_n, _dyadics(s, 2 * n), _dyadics(jc, n - r), lab)
            groups["nonzero_prob_ge_t_influence"].add((nz_s - s) / four_n, _dyadics(s, 2 * n), _dyadics(nz, n - r), lab)
            lower = s * (1 << (2 * r - 2)) - nz_s
            groups["t_influence_ge_scaled_nonzero_prob"].add(
                lower / four_n / (1 << (2 * r - 2)), _dyadics(nz, n - r + 2 * r - 2), _dyadics(s, 2 * n), lab
            )
            coef_s = c * (1 << n)  # |f^(i)| * 4**n
            lower2 = s * (1 << (r - 1)) - coef_s
            groups["t_influence_ge_scaled_coefficient"].add(
                lower2 / four_n / (1 << (r - 1)), _dyadics(c, n + r - 1), _dyadics(s, 2 * n), lab
            )
            if r <= 2:
                groups["joint_eq_nonzero_prob"].add(
                    -np.abs(jc - nz) / restr, _dyadics(jc, n - r), _dyadics(nz, n - r), lab
                )
            if r == 1:
                flips = np.count_nonzero(tables != tables[:, rows ^ mask], axis=1)
                # P(flip) = flips / 2**n; every notion must equal it
                agree = (jc * 2 == flips) & (cc * 2 == flips) & (s == flips * (1 << n))
                groups["single_bit_agreement"].add(
                    np.where(agree, 0.0, -1.0), _dyadics(s, 2 * n), _dyadics(flips, n), lab, passed=agree
                )
    return [g.result() for g in groups.values() if g.count]


# ---------------------------------------------------------------- integral identities


def beta(a: int, b: int) -> Fraction:
    """B(a, b) = (a-1)! (b-1)! / (a+b-1)! for positive integers."""
    return Fraction(math.factorial(a - 1) * math.factorial(b - 1), math.factorial(a + b - 1))


def _level_superset_sums(t: FourierTable) -> list[np.ndarray]:
    """out[m][i] = sum of coeffs[k]^2 over k containing i with |k| = m (scaled by 4**n)."""
    pc = popcounts(t.n)
    sq = np.array([int(c) * int(c) for c in t.coeffs], dtype=object)
    out = []
    for m in range(t.n + 1):
        level = np.where(pc == m, sq, 0)
        out.append(superset_sums(level))
    return out


def _derivative_level_weights(f: BooleanFunction, i: IndexSet) -> list[Fraction]:
    """Level weights of the spectrum of d_i f, computed from the pointwise derivative."""
    deriv = derivative_pointwise(f, i)
    spec = butterfly(deriv.values)  # scaled by 2**(n + |i|)
    pc = popcounts(f.n)
    denom = 4 ** (f.n + len(i))
    return [Fraction(int(np.sum(spec[pc == m].astype(object) ** 2)), denom) for m in range(f.n + 1)]


def _poly_integral(coeffs: list[float], weight_power: int, scale: float) -> float:
    """scale * int_0^1 (1-u)^weight_power * sum_m coeffs[m] u^m du by adaptive Simpson."""

    def integrand(u):
        acc = 0.0
        for c in reversed(coeffs):
            acc = acc * u + c
        return scale * (1.0 - u) ** weight_power * acc

    return adaptive_simpson(integrand, 0.0, 1.0, tol=QUAD_TOL, min_width=1e-14)


def _identity_result(name, instance, lhs, exact, numeric) -> CheckResult:
    """Exact route must match with zero slack; the quadrature excess over 1e-8 counts against the slack."""
    res = compare_eq(name, instance, lhs, exact, 0.0)
    err = abs(numeric - float(lhs))
    res.details = {"quadrature": numeric, "quadrature_error": err}
    if err > QUAD_AGREEMENT:
        res.slack -= err - QUAD_AGREEMENT
        res.passed = False
    return res


def kkl_identity_sides(f: BooleanFunction, d: int):
    """(W^{>=d}, exact Beta-reduction route, quadrature route)."""
    t = fwht(f)
    lhs = weight_at_least(t, d)
    levels = _level_superset_sums(t)
    four_n = 4 ** t.n
    exact = Fraction(0)
    poly = [0.0] * (t.n + 1)
    for mask in masks_of_size(t.n, d):
        mask = int(mask)
        for m in range(d, t.n + 1):
            w = levels[m][mask]
            if w:
                # 2d * (1/2) B(d, m - d + 1) for the integral of one level-m term
                exact += Fraction(int(w), four_n) * d * beta(d, m - d + 1)
        lw = _derivative_level_weights(f, IndexSet(mask, t.n))
        for m, v in enumerate(lw):
            poly[m] += float(v)
    # 2d * int_0^inf (e^{2t}-1)^{d-1} e^{-2dt} ||P_t d_i f||^2 dt with u = e^{-2t}
    numeric = _poly_integral(poly, d - 1, float(d))
    return lhs, exact, numeric


def check_integral_identity_kkl(f: BooleanFunction, d: int) -> CheckResult:
    """W^{>=d}(f) equals 2d sum_i int (e^{2t}-1)^{d-1} e^{-2dt} ||P_t d_i f||^2 dt."""
    if not 1 <= d <= f.n:
        raise BadDegree(f"d={d} outside [1, {f.n}]")
    lhs, exact, numeric = kkl_identity_sides(f, d)
    return _identity_result("kkl_integral_identity", f"{describe(f)} d={d}", lhs, exact, numeric)


def fkn_identity_sides(g: BooleanFunction, j: IndexSet):
    t = fwht(g)
    lhs = t_influence(t, j) - t.coefficient(j) * t.coefficient(j)
    levels = _level_superset_sums(t)
    four_n = 4 ** t.n
    k = len(j)
    exact = Fraction(0)
    poly = [0.0] * (t.n + 1)
    for extra in range(t.n):
        bit = 1 << extra
        if j.mask & bit:
            continue
        i = IndexSet(j.mask | bit, t.n)
        for m in range(k + 1, t.n + 1):
            w = levels[m][i.mask]
            if w:
                # 2 * (1/2) B(1, m - |i| + 1)
                exact += Fraction(int(w), four_n) * beta(1, m - (k + 1) + 1)
        for m, v in enumerate(_derivative_level_weights(g, i)):
            poly[m] += float(v)
    numeric = _poly_integral(poly, 0, 1.0)
    return lhs, exact, numeric


def check_integral_identity_fkn(g: BooleanFunction, j) -> CheckResult:
    """Inf_j(g) - g^(j)^2 equals 2 sum_{i > j, |i|=|j|+1} int e^{-2t} ||P_t d_i g||^2 dt."""
    j = as_index_set(j, g.n)
    if len(j) >= g.n:
        raise DimensionMismatch(f"|j|={len(j)} must be smaller than n={g.n}")
    lhs, exact, numeric = fkn_identity_sides(g, j)
    return _identity_result("fkn_integral_identity", f"{describe(g)} j={j}", lhs, exact, numeric)


# ---------------------------------------------------------------- hypercontractive integral bound


def hypercontractive_integral(f: BooleanFunction, i: IndexSet, l: int) -> float:
    """int_0^inf (e^{2t}-1)^{l-1} e^{-2lt} ||P_t d_i f||^2 dt by quadrature."""
    lw = [float(v) for v in _derivative_level_weights(f, i)]
    return _poly_integral(lw, l - 1, 0.5)


def check_kklprop2_bound(f: BooleanFunction, i, d: int, l: int) -> CheckResult:
    """The weighted heat integral of d_i f is at most (l-1)! 4^{d-1} Inf / ln^l(1/Inf)."""
    i = as_index_set(i, f.n)
    if not 1 <= l <= d:
        raise PreconditionViolated(f"need 1 <= l <= d, got l={l}, d={d}")
    deriv = derivative_pointwise(f, i)
    if not deriv.in_lattice(d - 1):
        raise PreconditionViolated(f"d_i f takes values outside Z/2^{d - 1}")
    inf = deriv.squared_norm()
    if inf > 1:
        raise PreconditionViolated("T-influence exceeds 1")
    lhs = hypercontractive_integral(f, i, l)
    if inf == 0:
        rhs = 0.0
    elif inf == 1:
        rhs = math.inf
    else:
        x = float(inf)
        rhs = math.factorial(l - 1) * 4 ** (d - 1) * x / math.log(1 / x) ** l
    return compare_le("hypercontractive_integral_bound", f"{describe(f)} i={i} d={d} l={l}",
                      lhs, rhs, FLOAT_TOL, t_influence=inf)


# ---------------------------------------------------------------- hypercontractivity, log-Sobolev


def q_norm(values: np.ndarray, q: float) -> float:
    """(E|v|^q)^{1/q}; the mean is exact when every |v| is 0 or 1."""
    a = np.abs(np.asarray(values, dtype=np.float64))
    if np.all((a == 0) | (a == 1)):
        mean = Fraction(int(np.count_nonzero(a)), a.size)
        return float(mean) ** (1.0 / q)
    return float(np.mean(a ** q)) ** (1.0 / q)


def check_hypercontractivity(f: BooleanFunction, t: float) -> CheckResult:
    """||P_t f||_2 <= ||f||_{1+e^{-2t}}."""
    lhs = heat(fwht(f), t).norm()
    q = 1.0 + math.exp(-2.0 * t)
    rhs = q_norm(f.signs(), q)
    return compare_le("hypercontractivity", f"{describe(f)} t={t}", lhs, rhs, EXACT_VS_FLOAT_TOL, q=q)


def _zero_one(h) -> tuple[int, np.ndarray]:
    arr = np.asarray(h)
    if isinstance(h, BooleanFunction):
        raise RangeViolation("pass the {0,1} table explicitly, e.g. f.table.astype(int)")
    if not np.all((arr == 0) | (arr == 1)):
        raise RangeViolation("log-Sobolev check needs a {0,1}-valued function")
    n = arr.size.bit_length() - 1
    if arr.ndim != 1 or arr.size != 1 << n or n < 1:
        raise DimensionMismatch("table length must be a power of two")
    return n, arr.astype(bool)


def zero_one_total_influence(h) -> Dyadic:
    """TotInf of a {0,1}-valued table: each bit contributes P(h changes) / 4."""
    n, arr = _zero_one(h)
    rows = np.arange(1 << n)
    changes = sum(int(np.count_nonzero(arr != arr[rows ^ (1 << j)])) for j in range(n))
    return Dyadic(changes, n + 2)


def log_sobolev_rhs(mean: Fraction) -> float:
    if mean == 0:
        return 0.0
    return 0.5 * float(mean) * math.log(1.0 / float(mean))


def check_log_sobolev(h) -> CheckResult:
    """TotInf(h) >= (1/2) E h ln(1/E h) for h into {0,1}."""
    n, arr = _zero_one(h)
    tot = zero_one_total_influence(arr)
    mean = Fraction(int(np.count_nonzero(arr)), 1 << n)
    bits = "".join("1" if b else "0" for b in arr) if n <= 6 else f"<{1 << n} rows>"
    return compare_le("log_sobolev", f"n={n} h={bits}", log_sobolev_rhs(mean), tot, EXACT_VS_FLOAT_TOL)


def log_sobolev_battery(tables: np.ndarray, n: int) -> list[CheckResult]:
    rows = np.arange(1 << n)
    changes = np.zeros(len(tables), dtype=np.int64)
    for j in range(n):
        changes += np.count_nonzero(tables != tables[:, rows ^ (1 << j)], axis=1)
    tot = changes / float(1 << (n + 2))
    means = np.count_nonzero(tables, axis=1)
    rhs = np.array([log_sobolev_rhs(Fraction(int(m), 1 << n)) for m in means])
    g = _Group("log_sobolev", f"all {len(tables)} {{0,1}}-valued functions n={n}", EXACT_VS_FLOAT_TOL)
    g.add(tot - rhs, rhs, _dyadics(changes, n + 2), _label(tables, n))
    return [g.result()]


# ---------------------------------------------------------------- degree lattice


def check_degree_lattice(g: BooleanFunction, d: int) -> CheckResult:
    """Coefficients of a degree-<=d Boolean function lie in Z/2^{d-1}; at most 4^{d-1} are non-zero."""
    if d < 1:
        raise BadDegree("d must be at least 1")
    t = fwht(g)
    if degree(t) > d:
        raise DegreeTooHigh(f"degree {degree(t)} exceeds {d}")
    shift = g.n - (d - 1)
    on_lattice = True if shift <= 0 else bool(np.all(t.coeffs % (1 << shift) == 0))
    count = int(np.count_nonzero(t.coeffs))
    limit = 1 << (2 * d - 2)
    res = compare_le("degree_lattice", f"{describe(g)} d={d}", count, limit, 0.0, on_lattice=on_lattice)
    if not on_lattice:
        res.slack, res.passed = -1.0, False
    return res


def lattice_battery(tables: np.ndarray, n: int, degrees=(1, 2, 3, 4)) -> list[CheckResult]:
    coeffs, _, _ = _batch_spectra(tables)
    pc = popcounts(n)
    nz = coeffs != 0
    deg = np.where(nz, pc[None, :], 0).max(axis=1)
    out = []
    label = _label(tables, n)
    for d in degrees:
        sel = np.flatnonzero(deg <= d)
        shift = n - (d - 1)
        c = coeffs[sel]
        on = np.ones(len(sel), dtype=bool) if shift <= 0 else np.all(c % (1 << shift) == 0, axis=1)
        counts = np.count_nonzero(c, axis=1)
        limit = 1 << (2 * d - 2)
        passed = on & (counts <= limit)
        g = _Group("degree_lattice", f"{len(sel)} functions of degree <= {d}, n={n}")
        g.add(np.where(on, limit - counts, -1).astype(float), counts, lambda k: limit,
              lambda k: label(int(sel[k]), f" d={d}"), passed=passed)
        out.append(g.result())
    return out


# ---------------------------------------------------------------- nearest low-degree function


@dataclass
class ApproxResult:
    g: BooleanFunction
    distance_sq: Dyadic
    coeff_deviations: dict
    is_unique: bool
    method: str
    candidates: int

    def to_json(self) -> dict:
        return {
            "g": "".join("1" if b else "0" for b in self.g.table),
            "g_degree": degree(fwht(self.g)),
            "distance_sq": self.distance_sq.to_json(),
            "is_unique": self.is_unique,
            "method": self.method,
            "candidates": self.candidates,
            "coeff_deviations": [
                {"set": IndexSet(m, self.g.n).indices(), "deviation": v.to_json()}
                for m, v in sorted(self.coeff_deviations.items())
            ],
        }


_LOW_DEGREE_CACHE: dict = {}


def low_degree_tables(n: int, d: int) -> np.ndarray:
    """All Boolean tables on n <= 4 bits of degree <= d, in lexicographic truth-table order."""
    key = (n, d)
    if key not in _LOW_DEGREE_CACHE:
        tables = all_functions(n)
        coeffs = transform_signs(np.where(tables, 1, -1))
        deg = np.where(coeffs != 0, popcounts(n)[None, :], 0).max(axis=1)
        sel = tables[deg <= d]
        sel.setflags(write=False)
        _LOW_DEGREE_CACHE[key] = sel
    return _LOW_DEGREE_CACHE[key]


def _signed_vectors(total: int, max_abs: int):
    """Count of ordered sequences of non-zero integers with squares summing to ``total``, by length."""
    ways = [[0] * (total + 1) for _ in range(total + 1)]
    ways[0][0] = 1
    for length in range(1, total + 1):
        for s in range(total + 1):
            acc = 0
            for a in range(1, max_abs + 1):
                if a * a <= s:
                    acc += 2 * ways[length - 1][s - a * a]
            ways[length][s] = acc
    return [ways[length][total] for length in range(total + 1)]


def lattice_search_size(n: int, d: int) -> int:
    sets = sum(math.comb(n, r) for r in range(d + 1))
    target = 4 ** (d - 1)
    per_len = _signed_vectors(target, 1 << (d - 1))
    # positions are chosen in increasing order, each with an ordered value sequence
    return sum(math.comb(sets, length) * per_len[length] for length in range(1, len(per_len)) if length <= sets)


def _lattice_candidates(n: int, d: int, limit: int) -> np.ndarray:
    """Boolean tables of degree <= d found by enumerating lattice coefficient vectors."""
    size = lattice_search_size(n, d)
    if size > limit:
        raise SearchSpaceTooLarge(f"lattice search would visit {size} coefficient vectors (limit {limit})")
    support = [int(m) for m in np.flatnonzero(popcounts(n) <= d)]
    target = 4 ** (d - 1)
    max_abs = 1 << (d - 1)
    found = []
    batch = []

    def flush():
        if not batch:
            return
        vecs = np.zeros((len(batch), 1 << n), dtype=np.int64)
        for row, assignment in enumerate(batch):
            for m, a in assignment:
                vecs[row, m] = a
        vals = butterfly(vecs, inverse=True)  # 2**(d-1) * g(x)
        ok = np.all(np.abs(vals) == max_abs, axis=1)
        for row in np.flatnonzero(ok):
            found.append(vals[row] > 0)
        batch.clear()

    def rec(start, remaining, chosen):
        if remaining == 0:
            batch.append(tuple(chosen))
            if len(batch) >= 4096:
                flush()
            return
        for pos in range(start, len(support)):
            for a in range(1, max_abs + 1):
                if a * a > remaining:
                    break
                for sgn in (a, -a):
                    chosen.append((support[pos], sgn))
                    rec(pos + 1, remaining - a * a, chosen)
                    chosen.pop()

    rec(0, target, [])
    flush()
    if not found:
        return np.zeros((0, 1 << n), dtype=bool)
    arr = np.unique(np.array(found, dtype=bool), axis=0)
    return arr[np.lexsort(arr.T[::-1])]


def _pick_nearest(f: BooleanFunction, cands: np.ndarray):
    ham = np.count_nonzero(cands != f.table[None, :], axis=1)
    best = int(ham.min())
    ties = np.flatnonzero(ham == best)
    # candidate arrays are in lexicographic truth-table order, so the first tie wins
    return cands[ties[0]], best, len(ties)


def nearest_low_degree(
    f: BooleanFunction,
    d: int,
    method: str = "auto",
    lattice: bool = False,
    limit: int = 2_000_000,
) -> ApproxResult:
    """Closest degree-<=d Boolean function to f in squared L2 distance.

    ``method`` is ``"exhaustive"`` (n <= 4, filters all 2^(2^n) functions),
    ``"lattice"`` (enumerates coefficient vectors on the Z/2^(d-1) lattice), or
    ``"auto"``: exhaustive for n <= 4, lattice for larger n only when
    ``lattice=True``.
    """
    if d < 1:
        raise BadDegree("d must be at least 1")
    if method == "auto":
        if f.n <= EXHAUSTIVE_MAX_N:
            method = "exhaustive"
        elif lattice and f.n <= 10:
            method = "lattice"
        else:
            raise SearchSpaceTooLarge(
                f"n={f.n}: exhaustive search needs n <= {EXHAUSTIVE_MAX_N}; enable the lattice search for n <= 10"
            )
    if method == "exhaustive":
        cands = low_degree_tables(f.n, d)
    elif method == "lattice":
        if f.n > 10:
            raise SearchSpaceTooLarge("lattice search is limited to n <= 10")
        cands = _lattice_candidates(f.n, d, limit)
    else:
        raise ValueError(f"unknown method {method!r}")
    table, ham, ties = _pick_nearest(f, cands)
    g = BooleanFunction(f.n, table)
    tf, tg = fwht(f), fwht(g)
    devs = {
        int(m): abs(Dyadic(int(tf.coeffs[m]) - int(tg.coeffs[m]), f.n))
        for m in np.flatnonzero(popcounts(f.n) <= d)
    }
    return ApproxResult(g, Dyadic(4 * ham, f.n), devs, ties == 1, method, len(cands))


def fkn_report(f: BooleanFunction, d: int, lattice: bool = False) -> dict:
    """Empirical ratios |f^(j) - g^(j)| / (alpha* (ln n/n)^|j|) for the nearest degree-d g.

    alpha* = MaxInf_{d+1}(f) (n/ln n)^{d+1} is the smallest alpha meeting the
    small-influence assumption.  No constant is asserted.
    """
    if d < 1:
        raise BadDegree("d must be at least 1")
    if f.n < d + 1 or f.n < 2:
        raise BadDegree(f"need n >= max(d+1, 2), got n={f.n}, d={d}")
    t = fwht(f)
    where, mi = max_influence(t, d + 1)
    ratio_unit = math.log(f.n) / f.n
    alpha = float(mi) / ratio_unit ** (d + 1)
    approx = nearest_low_degree(f, d, lattice=lattice)
    rows = []
    for m, dev in sorted(approx.coeff_deviations.items()):
        size = bin(m).count("1")
        denom = alpha * ratio_unit ** size
        if denom > 0:
            ratio = float(dev) / denom
        else:
            ratio = 0.0 if dev == 0 else math.inf
        rows.append({"set": IndexSet(m, f.n).indices(), "deviation": dev.to_json(), "ratio": value_to_json(ratio)})
    return {
        "n": f.n,
        "d": d,
        "max_influence_next": mi.to_json(),
        "max_influence_next_set": where.indices(),
        "alpha_star": alpha,
        "approximation": approx.to_json(),
        "ratios": rows,
        "max_ratio": value_to_json(max((r["ratio"] for r in rows if isinstance(r["ratio"], float)), default=0.0)),
    }


# ---------------------------------------------------------------- sharpness


def sharpness_report(spec, d: int, sample_budget: int = 200, samples: int = 100_000, seed: int = 0,
                     exact: Optional[bool] = None, threads: int = 1) -> dict:
    """MaxJInf_d against W^{>=d} (log2 n / n)^d for a tribe-like function.

    Exact when the truth table is available; otherwise Monte Carlo over
    ``sample_budget`` d-sets (half inside blocks, half uniform).
    """
    from .families import coverage_stats
    from .sampler import (
        estimate_joint_influences,
        estimate_low_level_weights,
        estimate_sign_probabilities,
    )

    n = spec.n
    if not 1 <= d <= n:
        raise BadDegree(f"d={d} outside [1, {n}]")
    scale = (math.log2(n) / n) ** d
    cov = coverage_stats(spec.packing)
    t_blocks = len(spec.packing.blocks)
    harris = (1.0 - 2.0 ** -spec.k) ** t_blocks
    report = {
        "n": n, "d": d, "k": spec.k, "t": t_blocks, "seed": spec.seed,
        "coverage": cov.to_json(),
        "scale": scale,
        "harris_floor": harris,
        "e_minus_2_floor_applies": float(cov.t_over_2k) <= 0.25,
    }
    use_exact = spec.function is not None if exact is None else exact
    if use_exact:
        if spec.function is None:
            raise BudgetExhausted("exact engine needs the materialized truth table")
        f = spec.function
        t = fwht(f)
        w = weight_at_least(t, d)
        best, best_mask = -1, 0
        for mask in masks_of_size(n, d):
            c = int(joint_counts(f.table, n, int(mask))[0])
            if c > best:
                best, best_mask = c, int(mask)
        mj = Dyadic(best, n - d)
        p_plus = Dyadic(int(np.count_nonzero(f.table)), n)
        _, mi = max_influence(t, d)
        denom = float(w) * scale
        ratio = float(mj) / denom if denom > 0 else None
        report.update({
            "mode": "exact",
            "max_joint_influence": mj.to_json(),
            "max_joint_set": IndexSet(best_mask, n).indices(),
            "max_t_influence": mi.to_json(),
            "weight_at_least_d": w.to_json(),
            "p_plus": p_plus.to_json(),
            "p_minus": (1 - p_plus).to_json(),
            "ratio": ratio,
            "ratio_stderr": 0.0,
            "ratio_undefined": denom == 0,
        })
        return report
    if sample_budget < 1 or samples < 2:
        raise BudgetExhausted("sampled sharpness needs sample_budget >= 1 and samples >= 2")
    rng = np.random.Generator(np.random.Philox(seed))
    sets: list[IndexSet] = []
    seen = set()
    blocks = [b.bits() for b in spec.packing.blocks if len(b) >= d]
    attempts = 0
    while len(sets) < sample_budget and attempts < 50 * sample_budget:
        attempts += 1
        if blocks and len(sets) % 2 == 0:
            blk = blocks[int(rng.integers(len(blocks)))]
            pick = rng.choice(len(blk), size=d, replace=False)
            bits = sorted(blk[int(p)] for p in pick)
        else:
            bits = sorted(int(v) for v in rng.choice(n, size=d, replace=False))
        mask = sum(1 << b for b in bits)
        if mask not in seen:
            seen.add(mask)
            sets.append(IndexSet(mask, n))
    pw = spec.pointwise()
    jinfs = estimate_joint_influences(pw, sets, samples, seed)
    top = max(range(len(sets)), key=lambda k: (jinfs[k].value, -sets[k].mask))
    plus, minus = estimate_sign_probabilities(pw, samples, seed + 1, threads=threads)
    variance, low, w_est = estimate_low_level_weights(pw, d - 1, samples, seed + 2)
    mj = jinfs[top]
    denom = w_est.value * scale
    ratio = mj.value / denom if denom > 0 else None
    if ratio is not None and mj.value > 0:
        rel = math.hypot(mj.stderr / mj.value, w_est.stderr / w_est.value)
        ratio_se = ratio * rel
    else:
        ratio_se = None
    report.update({
        "mode": "sampled",
        "sets_sampled": len(sets),
        "samples": samples,
        "max_joint_influence": mj.to_json(),
        "max_joint_set": sets[top].indices(),
        "mean_joint_influence": float(np.mean([e.value for e in jinfs])),
        "p_plus": plus.to_json(),
        "p_minus": minus.to_json(),
        "p_minus_consistent_with_harris": minus.value >= harris - 3 * minus.stderr,
        "p_minus_consistent_with_e_minus_2": (
            minus.value >= math.exp(-2.0) - 3 * minus.stderr if report["e_minus_2_floor_applies"] else None
        ),
        "variance": variance.to_json(),
        "low_level_weight": low.to_json(),
        "weight_at_least_d": w_est.to_json(),
        "ratio": ratio,
        "ratio_stderr": ratio_se,
        "ratio_undefined": denom <= 0,
    })
    return report


# ---------------------------------------------------------------- suites

SUITES = ("main-theorem", "chain", "kkl-identity", "fkn-identity", "hypercontractivity", "log-sobolev", "lattice")
HEAT_TIMES = (0.05, 0.1, 0.5, 1.0, 2.0, 5.0)


def _exhaustive_or_sampled(n: int, seed: int, count: int = 500) -> np.ndarray:
    if n <= EXHAUSTIVE_MAX_N:
        return all_functions(n)
    return random_tables(n, count, seed + n)


def run_suite(name: str, n_max: int = 4, seed: int = 0, count: Optional[int] = None) -> list[CheckResult]:
    """Run one battery; exhaustive for n <= 4, seeded random functions beyond."""
    if name == "all":
        out = []
        for s in SUITES:
            out.extend(run_suite(s, n_max, seed, count))
        return out
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    if n_max < 1:
        raise BadDegree("n_max must be at least 1")
    out: list[CheckResult] = []
    if name == "main-theorem":
        for n in range(1, n_max + 1):
            out.extend(main_theorem_battery(_exhaustive_or_sampled(n, seed), n))
    elif name == "chain":
        for n in range(1, n_max + 1):
            out.extend(chain_battery(_exhaustive_or_sampled(n, seed), n))
    elif name == "log-sobolev":
        for n in range(1, n_max + 1):
            out.extend(log_sobolev_battery(_exhaustive_or_sampled(n, seed), n))
    elif name == "lattice":
        for n in range(1, min(n_max, EXHAUSTIVE_MAX_N) + 1):
            out.extend(lattice_battery(all_functions(n), n))
    elif name in ("kkl-identity", "fkn-identity"):
        top = min(max(n_max, 2), 10)
        rng = np.random.Generator(np.random.Philox(seed))
        for k in range(count or 200):
            n = int(rng.integers(2, top + 1))
            f = BooleanFunction(n, rng.integers(0, 2, 1 << n).astype(bool))
            if name == "kkl-identity":
                for d in range(1, min(3, n) + 1):
                    out.append(check_integral_identity_kkl(f, d))
            else:
                for r in range(0, min(2, n - 1) + 1):
                    for j in combinations(range(1, n + 1), r):
                        out.append(check_integral_identity_fkn(f, IndexSet.from_indices(n, j)))
    elif name == "hypercontractivity":
        top = max(n_max, 1)
        rng = np.random.Generator(np.random.Philox(seed))
        for k in range(count or 1000):
            n = int(rng.integers(1, top + 1))
            f = BooleanFunction(n, rng.integers(0, 2, 1 << n).astype(bool))
            for t in HEAT_TIMES:
                out.append(check_hypercontractivity(f, t))
    return out


def summary_line(name: str, results: list[CheckResult]) -> str:
    total = sum(r.details.get("count", 1) for r in results)
    failed = sum(r.details.get("failures", 0 if r.passed else 1) for r in results)
    return f"suite={name} pass={total - failed}/{total}"
