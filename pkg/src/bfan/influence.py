"""T-influence, joint and coalition influence, and their aggregates.

The ``*_counts`` kernels take a batch of truth tables, shape ``(F, 2**n)``, so
exhaustive sweeps over every function on a small cube run in a few vectorized
passes.  The single-function API is a thin layer over them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import derivative_pointwise
from .cube import (
    BooleanFunction,
    FourierTable,
    IndexSet,
    as_index_set,
    encode,
    exact_square_sum,
    masks_of_size,
    popcounts,
)
from .dyadic import Dyadic
from .errors import BadDegree, DimensionMismatch, EmptySet, IndexNotInSet


# ---------------------------------------------------------------- subcube kernels


def subcube_rows(n: int, mask: int) -> np.ndarray:
    """Row indices arranged as ``(2**(n-m), 2**m)``.

    Axis 0 runs over assignments to the complement of ``mask`` (compacted,
    little-endian), axis 1 over assignments to the coordinates in ``mask``
    (local bit r is the r-th smallest member).
    """
    inside = [j for j in range(n) if mask >> j & 1]
    outside = [j for j in range(n) if not mask >> j & 1]

    def scatter(positions):
        local = np.arange(1 << len(positions))
        rows = np.zeros(local.shape, dtype=np.int64)
        for r, j in enumerate(positions):
            rows |= ((local >> r) & 1) << j
        return rows

    return scatter(outside)[:, None] | scatter(inside)[None, :]


def _relevant(sub: np.ndarray, r: int) -> np.ndarray:
    """Whether local variable r matters in each subcube of ``sub`` (last axis = 2**m)."""
    size = sub.shape[-1]
    v = sub.reshape(*sub.shape[:-1], size // (2 << r), 2, 1 << r)
    return np.any(v[..., 0, :] != v[..., 1, :], axis=(-2, -1))


def _batch(tables) -> np.ndarray:
    arr = np.asarray(tables, dtype=bool)
    return arr[None, :] if arr.ndim == 1 else arr


def coalition_counts(tables, n: int, mask: int) -> np.ndarray:
    """Number of complement assignments leaving each function non-constant."""
    sub = _batch(tables)[:, subcube_rows(n, mask)]
    return np.count_nonzero(sub.any(axis=-1) & ~sub.all(axis=-1), axis=-1)


def joint_counts(tables, n: int, mask: int) -> np.ndarray:
    """Number of complement assignments where every coordinate of ``mask`` is relevant."""
    sub = _batch(tables)[:, subcube_rows(n, mask)]
    m = bin(mask).count("1")
    ok = np.ones(sub.shape[:-1], dtype=bool)
    for r in range(m):
        ok &= _relevant(sub, r)
    return np.count_nonzero(ok, axis=-1)


def signed_subcube_sums(tables, n: int, mask: int) -> np.ndarray:
    """``2**m * d_mask f`` on each complement assignment, shape ``(F, 2**(n-m))``."""
    sub = _batch(tables)[:, subcube_rows(n, mask)]
    m = bin(mask).count("1")
    parity = popcounts(m) if m else np.zeros(1, dtype=np.int8)
    # sign of prod_j y_j: -1 per coordinate set to -1 (local bit clear)
    chi = np.where((m - parity) % 2 == 0, 1, -1).astype(np.int64)
    vals = np.where(sub, 1, -1).astype(np.int64)
    return vals @ chi


def nonzero_derivative_counts(tables, n: int, mask: int) -> np.ndarray:
    return np.count_nonzero(signed_subcube_sums(tables, n, mask), axis=-1)


def superset_sums(values: np.ndarray) -> np.ndarray:
    """Zeta transform over supersets along the last axis: out[m] = sum_{s >= m} v[s]."""
    a = np.array(values, copy=True)
    size = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < size:
        v = a.reshape(*lead, size // (2 * h), 2, h)
        v[..., 0, :] += v[..., 1, :]
        h *= 2
    return a


def _squares(coeffs: np.ndarray, n: int) -> np.ndarray:
    c = np.asarray(coeffs)
    if c.dtype != object and c.size:
        peak = int(np.abs(c).max())
        if 2 * peak.bit_length() + n + 1 <= 62:
            return c.astype(np.int64) ** 2
    return np.array([int(x) * int(x) for x in c.ravel()], dtype=object).reshape(c.shape)


def all_t_influences(t: FourierTable) -> np.ndarray:
    """Scaled T-influences for every mask: ``out[m] / 4**n = Inf_m(f)``."""
    return superset_sums(_squares(t.coeffs, t.n))


# ---------------------------------------------------------------- public API


def t_influence(t: FourierTable, i) -> Dyadic:
    """Inf_i(f) = sum over j containing i of f^(j)^2; the empty set gives ||f||^2."""
    i = as_index_set(i, t.n)
    rows = np.arange(1 << t.n)
    sup = t.coeffs[(rows & i.mask) == i.mask]
    return Dyadic(exact_square_sum(sup), 2 * t.scale)


def _require_nonempty(i: IndexSet):
    if i.mask == 0:
        raise EmptySet("joint/coalition influence is defined for non-empty sets only")


def is_pivotal(f: BooleanFunction, i_set, i: int, x) -> bool:
    """Whether coordinate ``i`` can flip f once the coordinates outside ``i_set`` follow x."""
    i_set = as_index_set(i_set, f.n)
    if i not in i_set:
        raise IndexNotInSet(f"coordinate {i} is not in {i_set}")
    if len(x) != f.n:
        raise DimensionMismatch(f"point has {len(x)} coordinates, function has {f.n}")
    outside = encode(x) & ~i_set.mask
    rows = subcube_rows(f.n, i_set.mask)[0] | outside
    sub = f.table[rows]
    r = i_set.bits().index(i - 1)
    return bool(_relevant(sub[None, :], r)[0])


def joint_influence(f: BooleanFunction, i) -> Dyadic:
    """JInf_i(f): fraction of complement assignments on which all of i is pivotal."""
    i = as_index_set(i, f.n)
    _require_nonempty(i)
    count = int(joint_counts(f.table, f.n, i.mask)[0])
    return Dyadic(count, f.n - len(i))


def coalition_influence(f: BooleanFunction, i) -> Dyadic:
    """CInf_i(f): fraction of complement assignments leaving f undetermined."""
    i = as_index_set(i, f.n)
    _require_nonempty(i)
    count = int(coalition_counts(f.table, f.n, i.mask)[0])
    return Dyadic(count, f.n - len(i))


def nonzero_derivative_prob(f: BooleanFunction, i) -> Dyadic:
    """P(d_i f != 0), read off the pointwise derivative table."""
    i = as_index_set(i, f.n)
    _require_nonempty(i)
    return Dyadic(derivative_pointwise(f, i).nonzero_count(), f.n)


def total_influence(t: FourierTable) -> Dyadic:
    """TotInf(f) = sum_i |i| f^(i)^2."""
    pc = popcounts(t.n)
    total = 0
    for r in range(1, t.n + 1):
        total += r * exact_square_sum(t.coeffs[pc == r])
    return Dyadic(total, 2 * t.scale)


def max_influence(t: FourierTable, d: int) -> tuple[IndexSet, Dyadic]:
    """MaxInf_d(f) with its argmax; ties go to the numerically smallest mask."""
    if not 1 <= d <= t.n:
        raise BadDegree(f"d={d} outside [1, {t.n}]")
    scaled = all_t_influences(t)
    masks = masks_of_size(t.n, d)
    vals = scaled[masks]
    best = int(np.argmax(vals)) if vals.dtype != object else max(
        range(len(vals)), key=lambda k: (vals[k], -k)
    )
    return IndexSet(int(masks[best]), t.n), Dyadic(int(vals[best]), 2 * t.scale)


@dataclass(frozen=True)
class InfluenceReport:
    set: IndexSet
    t_influence: Dyadic
    joint: Dyadic
    coalition: Dyadic
    nonzero_derivative_prob: Dyadic

    def to_json(self) -> dict:
        return {
            "set": self.set.indices(),
            "t_influence": self.t_influence.to_json(),
            "joint": self.joint.to_json(),
            "coalition": self.coalition.to_json(),
            "nonzero_derivative_prob": self.nonzero_derivative_prob.to_json(),
        }


def influence_report(f: BooleanFunction, i, t: FourierTable | None = None) -> InfluenceReport:
    from .cube import fwht

    i = as_index_set(i, f.n)
    _require_nonempty(i)
    if t is None:
        t = fwht(f)
    return InfluenceReport(
        set=i,
        t_influence=t_influence(t, i),
        joint=joint_influence(f, i),
        coalition=coalition_influence(f, i),
        nonzero_derivative_prob=nonzero_derivative_prob(f, i),
    )
