"""Truth tables on {-1,1}^n, the integer Walsh-Hadamard transform and spectral weights.

Encoding: row ``b`` of a truth table holds f(x) where bit ``j`` of ``b`` set
means ``x_{j+1} = +1`` and clear means ``x_{j+1} = -1``.  A table bit of 1
encodes the output +1.  Index sets are n-bit masks with bit ``j`` standing for
coordinate ``j+1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .config import HARD_MAX_N, max_n
from .dyadic import Dyadic
from .errors import (
    BadDegree,
    DimensionMismatch,
    DimensionTooLarge,
    LengthMismatch,
    NotBoolean,
)

_POPCOUNT_CACHE: dict[int, np.ndarray] = {}


def popcounts(n: int) -> np.ndarray:
    """Popcount of every mask in ``range(2**n)`` (cached, read-only)."""
    pc = _POPCOUNT_CACHE.get(n)
    if pc is None:
        pc = np.zeros(1 << n, dtype=np.int8)
        for j in range(n):
            pc[1 << j: 1 << (j + 1)] = pc[: 1 << j] + 1
        pc.setflags(write=False)
        _POPCOUNT_CACHE[n] = pc
    return pc


def check_dimension(n: int) -> None:
    if n < 1:
        raise DimensionMismatch(f"dimension must be >= 1, got {n}")
    cap = max_n()
    if n > cap:
        raise DimensionTooLarge(f"n={n} exceeds the dimension cap {cap} (hard max {HARD_MAX_N})")


@dataclass(frozen=True)
class IndexSet:
    """A subset of [n] stored as a mask; bit j is coordinate j+1."""

    mask: int
    n: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.n:
            raise DimensionMismatch(f"mask {self.mask:#x} has bits outside [{self.n}]")

    @classmethod
    def of(cls, n: int, *indices: int) -> "IndexSet":
        """Build from 1-based coordinates: ``IndexSet.of(3, 1, 2)`` is {1,2}."""
        return cls.from_indices(n, indices)

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "IndexSet":
        mask = 0
        for i in indices:
            if not 1 <= i <= n:
                raise DimensionMismatch(f"index {i} outside [1, {n}]")
            mask |= 1 << (i - 1)
        return cls(mask, n)

    @classmethod
    def full(cls, n: int) -> "IndexSet":
        return cls((1 << n) - 1, n)

    def __len__(self):
        return bin(self.mask).count("1")

    def __iter__(self):
        return iter(self.indices())

    def __contains__(self, i):
        return 1 <= i <= self.n and bool(self.mask >> (i - 1) & 1)

    def indices(self) -> list[int]:
        """Sorted 1-based members."""
        return [j + 1 for j in range(self.n) if self.mask >> j & 1]

    def bits(self) -> list[int]:
        """Sorted 0-based bit positions."""
        return [j for j in range(self.n) if self.mask >> j & 1]

    def complement(self) -> "IndexSet":
        return IndexSet(((1 << self.n) - 1) ^ self.mask, self.n)

    def __str__(self):
        return "{" + ",".join(map(str, self.indices())) + "}"


def as_index_set(i, n: int) -> IndexSet:
    """Accept an IndexSet, a mask int, or an iterable of 1-based indices."""
    if isinstance(i, IndexSet):
        if i.n != n:
            raise DimensionMismatch(f"index set lives in dimension {i.n}, function in {n}")
        return i
    if isinstance(i, (int, np.integer)):
        return IndexSet(int(i), n)
    return IndexSet.from_indices(n, i)


def masks_of_size(n: int, d: int) -> np.ndarray:
    """All masks with popcount ``d``, in increasing numeric order."""
    return np.flatnonzero(popcounts(n) == d)


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """A function {-1,1}^n -> {-1,1} stored as an immutable bool vector."""

    n: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.table.shape != (1 << self.n,):
            raise LengthMismatch(f"table has {self.table.size} entries, expected {1 << self.n}")
        if self.table.dtype != np.bool_ or self.table.flags.writeable:
            t = np.array(self.table, dtype=np.bool_)
            t.setflags(write=False)
            object.__setattr__(self, "table", t)

    @classmethod
    def from_signs(cls, values: Sequence[int] | np.ndarray) -> "BooleanFunction":
        """Build from a length-2**n sequence of +-1 outputs."""
        arr = np.asarray(values)
        if not np.all((arr == 1) | (arr == -1)):
            raise NotBoolean("values must all be +1 or -1")
        return from_truth_table(arr == 1, _log2_length(arr.size))

    @classmethod
    def from_callable(cls, n: int, func) -> "BooleanFunction":
        """Tabulate ``func(x)`` where ``x`` is a tuple of +-1 of length n."""
        check_dimension(n)
        bits = [func(decode(b, n)) == 1 for b in range(1 << n)]
        return cls(n, np.array(bits, dtype=np.bool_))

    def signs(self) -> np.ndarray:
        """Outputs as an int8 array of +-1."""
        return np.where(self.table, 1, -1).astype(np.int8)

    def __call__(self, x) -> int:
        return evaluate(self, x)

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))

    def negate(self) -> "BooleanFunction":
        return BooleanFunction(self.n, ~self.table)


def _log2_length(size: int) -> int:
    n = size.bit_length() - 1
    if size < 2 or (1 << n) != size:
        raise LengthMismatch(f"length {size} is not a power of two >= 2")
    return n


def decode(b: int, n: int) -> tuple[int, ...]:
    """Row index -> point of {-1,1}^n."""
    return tuple(1 if b >> j & 1 else -1 for j in range(n))


def encode(x) -> int:
    """Point of {-1,1}^n -> row index."""
    b = 0
    for j, xj in enumerate(x):
        if xj == 1:
            b |= 1 << j
        elif xj != -1:
            raise DimensionMismatch(f"coordinate {j + 1} is {xj}, expected +-1")
    return b


def from_truth_table(bits, n: int) -> BooleanFunction:
    """Wrap a 0/1 bit vector of length 2**n as a BooleanFunction."""
    if n > max_n():
        raise DimensionTooLarge(f"n={n} exceeds the dimension cap {max_n()}")
    if n < 1:
        raise LengthMismatch("n must be at least 1")
    arr = np.asarray(bits)
    if arr.ndim != 1 or arr.size != 1 << n:
        raise LengthMismatch(f"expected {1 << n} bits for n={n}, got {arr.size}")
    if arr.dtype != np.bool_:
        if not np.all((arr == 0) | (arr == 1)):
            raise NotBoolean("truth table entries must be 0 or 1")
        arr = arr.astype(np.bool_)
    return BooleanFunction(n, arr)


def evaluate(f: BooleanFunction, x) -> int:
    if len(x) != f.n:
        raise DimensionMismatch(f"point has {len(x)} coordinates, function has {f.n}")
    return 1 if f.table[encode(x)] else -1


# ---------------------------------------------------------------- transform


def butterfly(values: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Unnormalized Walsh-Hadamard butterfly along the last axis (returns a new array).

    Forward maps a table of values to ``sum_x v(x) chi_i(x)``; ``inverse=True``
    maps coefficients back to ``sum_i c_i chi_i(x)``.  Row bit 1 means x_j = +1,
    so the two directions are transposes of each other.  Any leading batch
    shape is allowed.
    """
    a = np.array(values, copy=True)
    size = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < size:
        v = a.reshape(*lead, size // (2 * h), 2, h)
        lo = v[..., 0, :].copy()
        hi = v[..., 1, :].copy()
        if inverse:
            v[..., 0, :] = lo - hi
            v[..., 1, :] = lo + hi
        else:
            v[..., 0, :] = lo + hi
            v[..., 1, :] = hi - lo
        h *= 2
    return a


def transform_signs(signs: np.ndarray) -> np.ndarray:
    """Batched transform of +-1 tables (last axis length 2**n) to int64 coefficients."""
    return butterfly(np.asarray(signs, dtype=np.int64))


def exact_square_sum(values: np.ndarray) -> int:
    """Exact ``sum(v*v)`` for an int64 array, immune to overflow."""
    v = np.asarray(values)
    if v.size == 0:
        return 0
    if v.dtype == object:
        return sum(int(x) * int(x) for x in v.ravel())
    peak = int(np.abs(v).max())
    if peak == 0:
        return 0
    if peak.bit_length() * 2 + v.size.bit_length() <= 62:
        return int(np.sum(v.astype(np.int64) ** 2))
    if peak.bit_length() * 2 <= 56:
        sq = v.astype(np.int64).ravel() ** 2
        chunk = 64
        pad = (-sq.size) % chunk
        if pad:
            sq = np.concatenate([sq, np.zeros(pad, dtype=np.int64)])
        partial = sq.reshape(-1, chunk).sum(axis=1)
        return sum(int(p) for p in partial)
    return sum(int(x) * int(x) for x in v.ravel())


@dataclass(frozen=True, eq=False)
class FourierTable:
    """Scaled integer Walsh coefficients: f^(mask) = coeffs[mask] / 2**scale.

    ``scale`` defaults to ``n``; derivative spectra carry ``n + |i|``.
    """

    n: int
    coeffs: np.ndarray = field(repr=False)
    exp: int = -1

    def __post_init__(self):
        if self.coeffs.shape != (1 << self.n,):
            raise LengthMismatch(f"coefficient table must have {1 << self.n} entries")
        if self.coeffs.flags.writeable:
            c = np.array(self.coeffs, dtype=np.int64 if self.coeffs.dtype != object else object)
            c.setflags(write=False)
            object.__setattr__(self, "coeffs", c)
        if self.exp < 0:
            object.__setattr__(self, "exp", self.n)

    @property
    def scale(self) -> int:
        return self.exp

    def coefficient(self, i) -> Dyadic:
        i = as_index_set(i, self.n)
        return Dyadic(int(self.coeffs[i.mask]), self.exp)

    def __getitem__(self, i) -> Dyadic:
        return self.coefficient(i)

    def squared_norm(self) -> Dyadic:
        """sum of f^(i)^2 over all i."""
        return Dyadic(exact_square_sum(self.coeffs), 2 * self.exp)

    def level_weights(self) -> list[Dyadic]:
        """Exact W^{=r} for r = 0..n."""
        pc = popcounts(self.n)
        return [
            Dyadic(exact_square_sum(self.coeffs[pc == r]), 2 * self.exp) for r in range(self.n + 1)
        ]

    def nonzero_masks(self) -> np.ndarray:
        return np.flatnonzero(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, FourierTable):
            return NotImplemented
        return self.n == other.n and self.exp == other.exp and np.array_equal(self.coeffs, other.coeffs)


def fwht(f: BooleanFunction) -> FourierTable:
    """coeffs[i] = sum_x f(x) chi_i(x), an integer in [-2**n, 2**n]."""
    return FourierTable(f.n, transform_signs(f.signs()))


def inverse_values(t: FourierTable) -> np.ndarray:
    """2**scale * sum_i f^(i) chi_i(x) for every row x, as exact integers."""
    return butterfly(t.coeffs, inverse=True)


def inverse_fwht(t: FourierTable) -> BooleanFunction:
    values = inverse_values(t)
    full = 1 << t.scale
    ok = (values == full) | (values == -full)
    if not np.all(ok):
        bad = int(np.flatnonzero(~ok)[0])
        got = Dyadic(int(values[bad]), t.scale)
        raise NotBoolean(f"reconstructed value {got} at row {bad} is not +-1")
    return BooleanFunction(t.n, values > 0)


def weight_exact(t: FourierTable, d: int) -> Dyadic:
    """W^{=d}(f)."""
    if not 0 <= d <= t.n:
        raise BadDegree(f"degree {d} outside [0, {t.n}]")
    pc = popcounts(t.n)
    return Dyadic(exact_square_sum(t.coeffs[pc == d]), 2 * t.scale)


def weight_at_least(t: FourierTable, d: int) -> Dyadic:
    """W^{>=d}(f): squared weight on levels d and above."""
    if not 0 <= d <= t.n:
        raise BadDegree(f"degree {d} outside [0, {t.n}]")
    pc = popcounts(t.n)
    return Dyadic(exact_square_sum(t.coeffs[pc >= d]), 2 * t.scale)


def degree(t: FourierTable) -> int:
    nz = t.coeffs != 0
    if not nz.any():
        return 0
    return int(popcounts(t.n)[nz].max())


def mean(f: BooleanFunction) -> Dyadic:
    """E f over the uniform cube."""
    plus = int(np.count_nonzero(f.table))
    return Dyadic(2 * plus - (1 << f.n), f.n)


# ---------------------------------------------------------------- named functions


def dictator(n: int, i: int = 1) -> BooleanFunction:
    check_dimension(n)
    b = np.arange(1 << n)
    return BooleanFunction(n, (b >> (i - 1) & 1).astype(bool))


def parity(n: int, indices: Iterable[int] | None = None) -> BooleanFunction:
    """chi_S as a Boolean function; S defaults to [n]."""
    check_dimension(n)
    s = IndexSet.full(n) if indices is None else IndexSet.from_indices(n, indices)
    # chi_S(x) = (-1)^{number of -1 coordinates inside S}
    b = np.arange(1 << n)
    minus = popcounts(n)[(~b) & s.mask]
    return BooleanFunction(n, minus % 2 == 0)


def constant(n: int, value: int = 1) -> BooleanFunction:
    check_dimension(n)
    return BooleanFunction(n, np.full(1 << n, value == 1, dtype=bool))


def majority(n: int) -> BooleanFunction:
    from .errors import BadParameters

    if n % 2 == 0:
        raise BadParameters("majority needs an odd number of inputs")
    check_dimension(n)
    return BooleanFunction(n, 2 * popcounts(n).astype(np.int64) > n)


def and_(n: int) -> BooleanFunction:
    check_dimension(n)
    t = np.zeros(1 << n, dtype=bool)
    t[-1] = True
    return BooleanFunction(n, t)


def or_(n: int) -> BooleanFunction:
    check_dimension(n)
    t = np.ones(1 << n, dtype=bool)
    t[0] = False
    return BooleanFunction(n, t)
