"""Exact dyadic rationals ``num / 2**exp``."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class Dyadic:
    """An exact rational whose denominator is a power of two.

    Values are kept normalized: ``num`` is odd whenever ``exp > 0``, and zero has ``exp == 0``.
    Negative exponents are absorbed into the numerator on construction.

    >>> Dyadic(6, 3)
    Dyadic(3, 2)
    >>> Dyadic(1, 1) + Dyadic(1, 2)
    Dyadic(3, 2)
    """

    __slots__ = ("_num", "_exp")

    def __init__(self, num: int = 0, exp: int = 0):
        num = int(num)
        exp = int(exp)
        if num == 0:
            exp = 0
        else:
            tz = (num & -num).bit_length() - 1
            shift = min(tz, exp) if exp > 0 else 0
            num >>= shift
            exp -= shift
            if exp < 0:
                num <<= -exp
                exp = 0
        self._num = num
        self._exp = exp

    @property
    def num(self) -> int:
        return self._num

    @property
    def exp(self) -> int:
        return self._exp

    @classmethod
    def from_value(cls, value) -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int):
            return cls(value, 0)
        frac = Fraction(value)
        den = frac.denominator
        if den & (den - 1):
            raise ValueError(f"{value!r} is not a dyadic rational")
        return cls(frac.numerator, den.bit_length() - 1)

    @staticmethod
    def _coerce(other):
        if isinstance(other, Dyadic):
            return other
        if isinstance(other, int):
            return Dyadic(other)
        return NotImplemented

    def _aligned(self, other: "Dyadic"):
        e = max(self._exp, other._exp)
        return self._num << (e - self._exp), other._num << (e - other._exp), e

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, e = self._aligned(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, e = self._aligned(other)
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Dyadic(self._num * other._num, self._exp + other._exp)

    __rmul__ = __mul__

    def __neg__(self):
        return Dyadic(-self._num, self._exp)

    def __abs__(self):
        return Dyadic(abs(self._num), self._exp)

    def __pos__(self):
        return self

    def halve(self, times: int = 1) -> "Dyadic":
        """Divide by ``2**times`` exactly."""
        return Dyadic(self._num, self._exp + times)

    def to_fraction(self) -> Fraction:
        return Fraction(self._num, 1 << self._exp)

    def __float__(self):
        return self._num / (1 << self._exp) if self._exp < 1000 else float(self.to_fraction())

    def _cmp_key(self, other):
        if isinstance(other, Dyadic):
            a, b, _ = self._aligned(other)
            return a, b
        if isinstance(other, int):
            return self._num, other << self._exp
        if isinstance(other, (Rational, float)):
            return self.to_fraction(), Fraction(other)
        return None

    def __eq__(self, other):
        key = self._cmp_key(other)
        if key is None:
            return NotImplemented
        return key[0] == key[1]

    def __lt__(self, other):
        key = self._cmp_key(other)
        if key is None:
            return NotImplemented
        return key[0] < key[1]

    def __le__(self, other):
        key = self._cmp_key(other)
        if key is None:
            return NotImplemented
        return key[0] <= key[1]

    def __gt__(self, other):
        key = self._cmp_key(other)
        if key is None:
            return NotImplemented
        return key[0] > key[1]

    def __ge__(self, other):
        key = self._cmp_key(other)
        if key is None:
            return NotImplemented
        return key[0] >= key[1]

    def __hash__(self):
        if self._exp == 0:
            return hash(self._num)
        return hash(self.to_fraction())

    def __bool__(self):
        return self._num != 0

    def __repr__(self):
        return f"Dyadic({self._num}, {self._exp})"

    def __str__(self):
        if self._exp == 0:
            return str(self._num)
        return f"{self._num}/{1 << self._exp}"

    def to_json(self) -> dict:
        return {"num": str(self._num), "exp": self._exp, "float": float(self)}


ZERO = Dyadic(0)
ONE = Dyadic(1)
