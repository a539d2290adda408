"""Discrete partial derivatives, restrictions and the heat semigroup."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .cube import (
    BooleanFunction,
    FourierTable,
    IndexSet,
    as_index_set,
    butterfly,
    popcounts,
)
from .dyadic import Dyadic
from .errors import DimensionMismatch, NegativeTime


@dataclass(frozen=True, eq=False)
class DerivativeTable:
    """Values of d_i f on every row, stored as integers scaled by ``2**order``."""

    n: int
    base_set: IndexSet
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.values.flags.writeable:
            v = np.array(self.values, dtype=np.int64)
            v.setflags(write=False)
            object.__setattr__(self, "values", v)

    @property
    def order(self) -> int:
        return len(self.base_set)

    def value(self, row: int) -> Dyadic:
        return Dyadic(int(self.values[row]), self.order)

    def dyadic_values(self) -> list[Dyadic]:
        return [Dyadic(int(v), self.order) for v in self.values]

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.values))

    def squared_norm(self) -> Dyadic:
        """E[(d_i f)^2], exact."""
        sq = int(np.sum(self.values.astype(np.int64) ** 2))
        return Dyadic(sq, 2 * self.order + self.n)

    def expectation(self) -> Dyadic:
        return Dyadic(int(self.values.sum()), self.order + self.n)

    def is_constant_along_base(self) -> bool:
        rows = np.arange(1 << self.n)
        cleared = rows & ~self.base_set.mask
        return bool(np.array_equal(self.values, self.values[cleared]))

    def in_lattice(self, denominator_exp: int) -> bool:
        """Every value lies in Z / 2**denominator_exp."""
        shift = self.order - denominator_exp
        if shift <= 0:
            return True
        return bool(np.all(self.values % (1 << shift) == 0))

    def spectrum(self) -> FourierTable:
        """Walsh coefficients of the derivative (scale ``n + order``)."""
        return FourierTable(self.n, butterfly(self.values), self.n + self.order)

    def __eq__(self, other):
        if not isinstance(other, DerivativeTable):
            return NotImplemented
        return (
            self.n == other.n
            and self.base_set == other.base_set
            and np.array_equal(self.values, other.values)
        )


def derivative_fourier(t: FourierTable, i) -> DerivativeTable:
    """d_i f via the spectrum: keep f^(j) for j >= i, relabel to j minus i, invert."""
    i = as_index_set(i, t.n)
    rows = np.arange(1 << t.n)
    keep = (rows & i.mask) == i.mask
    shifted = np.zeros_like(t.coeffs)
    shifted[rows[keep] ^ i.mask] = t.coeffs[keep]
    full = butterfly(shifted, inverse=True)
    # full = 2**scale * d_i f(x); rescale to 2**|i|
    drop = t.scale - len(i)
    if drop < 0:
        return DerivativeTable(t.n, i, full << -drop)
    if np.any(full % (1 << drop)):
        raise ValueError("derivative is not representable with denominator 2**|i|")
    return DerivativeTable(t.n, i, full >> drop)


def derivative_pointwise(f: BooleanFunction, i) -> DerivativeTable:
    """d_i f(x) = 2**-|i| * sum_y f(x^{i->y}) prod_j y_j, kept as the integer sum."""
    i = as_index_set(i, f.n)
    signs = f.signs().astype(np.int64)
    rows = np.arange(1 << f.n)
    base = rows & ~i.mask
    bits = i.bits()
    acc = np.zeros(1 << f.n, dtype=np.int64)
    for local in range(1 << len(bits)):
        ymask = 0
        minus = 0
        for r, j in enumerate(bits):
            if local >> r & 1:
                ymask |= 1 << j
            else:
                minus += 1
        sign = -1 if minus & 1 else 1
        acc += sign * signs[base | ymask]
    return DerivativeTable(f.n, i, acc)


def compose(d: DerivativeTable, j) -> DerivativeTable:
    """Apply one more single-bit derivative d_j to an existing derivative table."""
    j = as_index_set(j, d.n)
    if len(j) != 1:
        raise DimensionMismatch("compose takes a single coordinate")
    rows = np.arange(1 << d.n)
    plus = d.values[rows | j.mask]
    minus = d.values[rows & ~j.mask]
    if d.base_set.mask & j.mask:
        return DerivativeTable(d.n, d.base_set, np.zeros_like(d.values))
    return DerivativeTable(d.n, IndexSet(d.base_set.mask | j.mask, d.n), plus - minus)


# ---------------------------------------------------------------- restrictions


@dataclass(frozen=True)
class Restriction:
    """An assignment of +-1 values to the coordinates in ``fixed``."""

    fixed: IndexSet
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.fixed):
            raise DimensionMismatch("restriction needs one value per fixed coordinate")
        if any(v not in (1, -1) for v in self.values):
            raise DimensionMismatch("restriction values must be +-1")

    @classmethod
    def from_mapping(cls, n: int, assignment: Mapping[int, int]) -> "Restriction":
        """Build from ``{coordinate (1-based): value}``."""
        fixed = IndexSet.from_indices(n, assignment)
        return cls(fixed, tuple(assignment[i] for i in fixed.indices()))

    def fixed_row_bits(self) -> int:
        mask = 0
        for j, v in zip(self.fixed.bits(), self.values):
            if v == 1:
                mask |= 1 << j
        return mask


def restriction_rows(n: int, fixed_mask: int, fixed_bits: int) -> np.ndarray:
    """Source rows of the restricted function; free coordinates keep their order."""
    free = [j for j in range(n) if not fixed_mask >> j & 1]
    local = np.arange(1 << len(free))
    rows = np.full(local.shape, fixed_bits, dtype=np.int64)
    for r, j in enumerate(free):
        rows |= ((local >> r) & 1) << j
    return rows


def restrict(f: BooleanFunction, r: Restriction) -> BooleanFunction:
    """Fix the coordinates in ``r.fixed``; the free ones are relabelled 1..m in order."""
    if r.fixed.n != f.n:
        raise DimensionMismatch(f"restriction is over {r.fixed.n} coordinates, function has {f.n}")
    m = f.n - len(r.fixed)
    if m == 0:
        raise DimensionMismatch("a restriction must leave at least one coordinate free")
    rows = restriction_rows(f.n, r.fixed.mask, r.fixed_row_bits())
    return BooleanFunction(m, f.table[rows])


# ---------------------------------------------------------------- heat semigroup


@dataclass(frozen=True, eq=False)
class HeatTable:
    """Coefficients e^{-|i| t} f^(i) as doubles."""

    n: int
    t: float
    coeffs: np.ndarray = field(repr=False)

    def squared_norm(self) -> float:
        return float(np.dot(self.coeffs, self.coeffs))

    def norm(self) -> float:
        return math.sqrt(self.squared_norm())

    def values(self) -> np.ndarray:
        """P_t f evaluated on every row."""
        return butterfly(self.coeffs, inverse=True)


def heat(t: FourierTable | HeatTable, time: float) -> HeatTable:
    """P_time applied coefficientwise; a HeatTable input is damped further."""
    if time < 0 or math.isnan(time):
        raise NegativeTime(f"heat time must be >= 0, got {time}")
    levels = popcounts(t.n).astype(np.float64)
    damp = np.exp(-levels * time)
    if isinstance(t, HeatTable):
        return HeatTable(t.n, t.t + time, t.coeffs * damp)
    base = np.asarray(t.coeffs, dtype=np.float64) / float(2 ** t.scale)
    return HeatTable(t.n, float(time), base * damp)
