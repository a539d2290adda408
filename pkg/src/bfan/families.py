"""Dictators, parities, majorities, tribes and d-hypertribes.

Hypertribes are OR-of-ANDs over a packing of k-sets in which every d-set lies
in at most one block.  The packing comes from a seeded randomized greedy
search whose coverage of the d-sets is measured rather than assumed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

import numpy as np

from .config import max_n
from .cube import BooleanFunction, IndexSet
from .errors import BadParameters
from .sampler import TribeFunction


@dataclass(frozen=True)
class Packing:
    n: int
    k: int
    d: int
    blocks: tuple[IndexSet, ...]
    seed: Optional[int] = None

    def block_indices(self) -> list[list[int]]:
        return [b.indices() for b in self.blocks]

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "d": self.d, "seed": self.seed, "blocks": self.block_indices()}

    @classmethod
    def from_json(cls, doc: dict) -> "Packing":
        n = doc["n"]
        blocks = tuple(IndexSet.from_indices(n, b) for b in doc["blocks"])
        return cls(n, doc["k"], doc["d"], blocks, doc.get("seed"))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class CoverageStats:
    covered_d_sets: int
    total_d_sets: int
    block_count: int
    coverage_ratio: Fraction
    t_over_2k: Fraction

    @property
    def reaches_half(self) -> bool:
        return 2 * self.covered_d_sets >= self.total_d_sets

    def to_json(self) -> dict:
        return {
            "covered_d_sets": self.covered_d_sets,
            "total_d_sets": self.total_d_sets,
            "block_count": self.block_count,
            "coverage_ratio": float(self.coverage_ratio),
            "coverage_ratio_exact": str(self.coverage_ratio),
            "t_over_2k": float(self.t_over_2k),
            "reaches_half": self.reaches_half,
        }


def _validate(n, k, d):
    if not (isinstance(n, int) and isinstance(k, int) and isinstance(d, int)):
        raise BadParameters("n, k, d must be integers")
    if not n >= k >= d >= 1:
        raise BadParameters(f"need n >= k >= d >= 1, got n={n}, k={k}, d={d}")


def attempt_budget(n: int, k: int, d: int) -> int:
    """50 * C(n,d) / C(k,d) random draws, rounded up."""
    return -(-50 * math.comb(n, d) // math.comb(k, d))


def greedy_packing(
    n: int,
    k: int,
    d: int,
    seed: int = 0,
    budget: Optional[int] = None,
    lexicographic: bool = False,
) -> Packing:
    """Randomized greedy d-set-disjoint packing of k-subsets of [n].

    Candidates are uniform random k-sets drawn from a Philox stream keyed by
    ``seed``; one is accepted when none of its d-subsets is already covered.
    ``lexicographic=True`` scans all k-sets in lexicographic order instead.
    """
    _validate(n, k, d)
    covered: set[tuple[int, ...]] = set()
    blocks: list[IndexSet] = []

    def offer(block: tuple[int, ...]):
        subs = list(combinations(block, d))
        if any(s in covered for s in subs):
            return
        covered.update(subs)
        blocks.append(IndexSet.from_indices(n, [j + 1 for j in block]))

    if lexicographic:
        for block in combinations(range(n), k):
            offer(block)
    else:
        draws = attempt_budget(n, k, d) if budget is None else budget
        rng = np.random.Generator(np.random.Philox(seed))
        total = math.comb(n, d)
        for _ in range(draws):
            block = tuple(sorted(int(v) for v in rng.choice(n, size=k, replace=False)))
            offer(block)
            if len(covered) == total:
                break
    return Packing(n, k, d, tuple(blocks), seed if not lexicographic else None)


def coverage_stats(p: Packing) -> CoverageStats:
    covered = set()
    for b in p.blocks:
        covered.update(combinations(b.indices(), p.d))
    total = math.comb(p.n, p.d)
    t = len(p.blocks)
    return CoverageStats(
        covered_d_sets=len(covered),
        total_d_sets=total,
        block_count=t,
        coverage_ratio=Fraction(len(covered), total),
        t_over_2k=Fraction(t, 1 << p.k),
    )


def packing_is_valid(p: Packing) -> bool:
    """Every d-set lies in at most one block and blocks have size k."""
    seen = set()
    for b in p.blocks:
        if len(b) != p.k:
            return False
        for s in combinations(b.indices(), p.d):
            if s in seen:
                return False
            seen.add(s)
    return True


# ---------------------------------------------------------------- tribes


@dataclass(frozen=True)
class TribeSpec:
    n: int
    k: int
    d: int
    seed: Optional[int]
    packing: Packing
    k_exact: float = float("nan")
    k_rounded: bool = False
    function: Optional[BooleanFunction] = field(default=None, repr=False, compare=False)

    @property
    def blocks(self):
        return self.packing.blocks

    def pointwise(self) -> TribeFunction:
        return TribeFunction(self.n, [b.bits() for b in self.packing.blocks])

    def to_json(self) -> dict:
        doc = self.packing.to_json()
        doc.update({"k_exact": self.k_exact, "k_rounded": self.k_rounded})
        return doc


def _tribe_table(n: int, blocks) -> BooleanFunction:
    return TribeFunction(n, [b.bits() for b in blocks]).to_boolean()


def tribes(n: int, w: int) -> BooleanFunction:
    """OR of ANDs over the consecutive blocks {1..w}, {w+1..2w}, ..."""
    if w < 1 or n < 1 or n % w:
        raise BadParameters(f"tribe size {w} must divide n={n}")
    if n > max_n():
        raise BadParameters(f"n={n} exceeds the dimension cap {max_n()}")
    blocks = [IndexSet.from_indices(n, range(s + 1, s + w + 1)) for s in range(0, n, w)]
    return _tribe_table(n, blocks)


def tribes_spec(n: int, w: int) -> TribeSpec:
    if w < 1 or n < 1 or n % w:
        raise BadParameters(f"tribe size {w} must divide n={n}")
    blocks = tuple(IndexSet.from_indices(n, range(s + 1, s + w + 1)) for s in range(0, n, w))
    packing = Packing(n, w, 1, blocks)
    fn = _tribe_table(n, blocks) if n <= max_n() else None
    return TribeSpec(n, w, 0, None, packing, float(w), False, fn)


def default_block_size(n: int, d: int) -> tuple[int, float, bool]:
    """(k, d*log2(n/log2 n), whether k had to be rounded)."""
    if n < 3:
        raise BadParameters("hypertribes need n >= 3")
    exact = d * math.log2(n / math.log2(n))
    k = int(round(exact))
    rounded = abs(exact - k) > 1e-9
    k = max(d, min(k, n))
    return k, exact, rounded or k != round(exact)


def hypertribe(
    n: int,
    d: int,
    seed: int = 0,
    k_override: Optional[int] = None,
    lexicographic: bool = False,
) -> tuple[TribeSpec, TribeFunction]:
    """Build H_n^d over a greedy packing; the truth table is kept when n fits the cap."""
    if d < 2:
        raise BadParameters("hypertribes need d >= 2")
    if k_override is not None:
        k, exact, rounded = k_override, float("nan"), False
    else:
        k, exact, rounded = default_block_size(n, d)
    packing = greedy_packing(n, k, d, seed, lexicographic=lexicographic)
    spec = TribeSpec(n, k, d, seed, packing, exact, rounded)
    pw = spec.pointwise()
    if n <= max_n():
        spec = TribeSpec(n, k, d, seed, packing, exact, rounded, pw.to_boolean())
    return spec, pw
