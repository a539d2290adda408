"""Monte Carlo estimators for functions too large to tabulate.

Randomness comes from numpy's counter-based Philox generator.  Samples are
drawn in fixed-size chunks; chunk ``c`` uses ``Philox(seed).jumped(c)``, so an
estimate depends only on (seed, samples) and never on how many worker threads
produced it.  Per-chunk statistics are combined with the parallel Welford
update, in chunk order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cube import BooleanFunction, IndexSet, as_index_set, popcounts
from .errors import BadParameters, SubcubeTooLarge

CHUNK = 8192
MAX_SUBCUBE_BITS = 20


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int
    seed: int

    def within(self, exact: float, k: float = 3.0) -> bool:
        """|value - exact| <= k * stderr (an exact hit always counts)."""
        return abs(self.value - exact) <= k * self.stderr or self.value == exact

    def to_json(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "samples": self.samples, "seed": self.seed}


class Moments:
    """Running count/mean/M2 with the pairwise merge of Chan et al."""

    __slots__ = ("count", "mean", "m2")

    def __init__(self, count=0, mean=0.0, m2=0.0):
        self.count = count
        self.mean = mean
        self.m2 = m2

    @classmethod
    def of(cls, values: np.ndarray) -> "Moments":
        v = np.asarray(values, dtype=np.float64)
        if v.size == 0:
            return cls()
        mu = float(v.mean())
        return cls(v.size, mu, float(np.sum((v - mu) ** 2)))

    def merge(self, other: "Moments") -> "Moments":
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return Moments(n, mean, m2)

    def estimate(self, seed: int) -> Estimate:
        var = self.m2 / (self.count - 1) if self.count > 1 else 0.0
        return Estimate(self.mean, math.sqrt(max(var, 0.0) / self.count), self.count, seed)


# ---------------------------------------------------------------- pointwise functions


class PointwiseFunction:
    """A +-1 valued function evaluated on batches of points.

    ``evaluator`` receives an int8 array of shape ``(N, n)`` with +-1 entries
    and returns ``N`` values in {-1, +1}.
    """

    def __init__(self, n: int, evaluator: Callable[[np.ndarray], np.ndarray]):
        self.n = n
        self._evaluator = evaluator

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.int8)
        if pts.ndim != 2 or pts.shape[1] != self.n:
            raise BadParameters(f"points must have shape (N, {self.n})")
        return np.asarray(self._evaluator(pts), dtype=np.int8)

    def __call__(self, x) -> int:
        return int(self.evaluate(np.asarray([x], dtype=np.int8))[0])

    @classmethod
    def from_boolean(cls, f: BooleanFunction) -> "PointwiseFunction":
        table = f.signs()
        weights = (1 << np.arange(f.n, dtype=np.int64))

        def ev(points):
            return table[(points > 0).astype(np.int64) @ weights]

        return cls(f.n, ev)

    def subcube_values(self, base: np.ndarray, bits: Sequence[int]) -> np.ndarray:
        """Values on the subcube through each base point spanned by ``bits``.

        Returns ``(N, 2**m)``; local bit r set means coordinate ``bits[r]`` is +1.
        """
        m = len(bits)
        n_pts = base.shape[0]
        pts = np.repeat(base[:, None, :], 1 << m, axis=1)
        local = np.arange(1 << m)
        for r, j in enumerate(bits):
            pts[:, :, j] = np.where((local >> r) & 1, 1, -1)[None, :]
        return self.evaluate(pts.reshape(n_pts << m, self.n)).reshape(n_pts, 1 << m)


class TribeFunction(PointwiseFunction):
    """OR of ANDs over ``blocks`` (0-based coordinate lists); +1 is true."""

    def __init__(self, n: int, blocks: Sequence[Sequence[int]]):
        self.blocks = [tuple(sorted(b)) for b in blocks]
        inc = np.zeros((n, len(self.blocks)), dtype=np.float32)
        for a, block in enumerate(self.blocks):
            inc[list(block), a] = 1.0
        self._incidence = inc
        super().__init__(n, self._evaluate_blocks)

    def unset_counts(self, points: np.ndarray) -> np.ndarray:
        """Number of -1 coordinates inside each block, shape ``(N, t)``."""
        minus = (points < 0).astype(np.float32)
        return np.rint(minus @ self._incidence).astype(np.int32)

    def _evaluate_blocks(self, points):
        if not self.blocks:
            return np.full(points.shape[0], -1, dtype=np.int8)
        out = np.empty(points.shape[0], dtype=np.int8)
        for s in range(0, points.shape[0], CHUNK):
            counts = self.unset_counts(points[s:s + CHUNK])
            out[s:s + CHUNK] = np.where((counts == 0).any(axis=1), 1, -1)
        return out

    def subcube_values(self, base, bits, counts=None):
        m = len(bits)
        n_pts = base.shape[0]
        if not self.blocks:
            return np.full((n_pts, 1 << m), -1, dtype=np.int8)
        if counts is None:
            counts = self.unset_counts(base)
        bits = list(bits)
        inside = np.zeros(len(self.blocks), dtype=np.int64)  # local mask of block within bits
        for r, j in enumerate(bits):
            inside |= (self._incidence[j] > 0).astype(np.int64) << r
        touching = np.flatnonzero(inside)
        # unset count of each touching block ignoring the subcube coordinates
        own = (base[:, bits] < 0).astype(np.int32)
        adj = counts[:, touching].copy()
        for r in range(m):
            hit = (inside[touching] >> r) & 1
            adj -= own[:, [r]] * hit[None, :].astype(np.int32)
        sat_rest = (counts == 0).sum(axis=1) - (counts[:, touching] == 0).sum(axis=1) > 0
        local = np.arange(1 << m)
        minus_of = ((1 << m) - 1) ^ local  # coordinates set to -1 in each local point
        out = np.where(sat_rest[:, None], 1, -1).astype(np.int8).repeat(1 << m, axis=1)
        free = adj == 0
        for col, a in enumerate(touching):
            ok_local = (int(inside[a]) & minus_of) == 0
            hit = free[:, col][:, None] & ok_local[None, :]
            out[hit] = 1
        return out

    def to_boolean(self) -> BooleanFunction:
        rows = np.arange(1 << self.n, dtype=np.int64)
        table = np.zeros(1 << self.n, dtype=bool)
        for block in self.blocks:
            mask = sum(1 << j for j in block)
            table |= (rows & mask) == mask
        return BooleanFunction(self.n, table)


# ---------------------------------------------------------------- drivers


def _check_samples(samples: int):
    if samples < 2:
        raise BadParameters("at least two samples are required")


def _chunk_points(n: int, seed: int, c: int, size: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed).jumped(c))
    return (rng.integers(0, 2, size=(size, n), dtype=np.int8) * 2 - 1).astype(np.int8)


def _run(n: int, samples: int, seed: int, per_chunk, threads: int = 1, width: int = 1):
    """Evaluate ``per_chunk(points) -> (size, width)`` over all chunks, merged in order."""
    sizes = [min(CHUNK, samples - s) for s in range(0, samples, CHUNK)]

    def job(c):
        pts = _chunk_points(n, seed, c, sizes[c])
        vals = np.asarray(per_chunk(pts), dtype=np.float64).reshape(sizes[c], width)
        return [Moments.of(vals[:, w]) for w in range(width)]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(c) for c in range(len(sizes))]
    totals = [Moments() for _ in range(width)]
    for part in parts:
        totals = [t.merge(p) for t, p in zip(totals, part)]
    return [t.estimate(seed) for t in totals]


def _subcube_bits(f: PointwiseFunction, i) -> list[int]:
    i = as_index_set(i, f.n)
    if len(i) > MAX_SUBCUBE_BITS:
        raise SubcubeTooLarge(f"|i|={len(i)} exceeds {MAX_SUBCUBE_BITS}")
    return i.bits()


def _chi_local(m: int) -> np.ndarray:
    return np.where((m - popcounts(m).astype(np.int64)) % 2 == 0, 1, -1) if m else np.ones(1, dtype=np.int64)


def _derivative_and_joint(sub: np.ndarray, m: int):
    """Per-sample (d_i f)^2 and all-pivotal indicator from subcube values."""
    deriv = (sub.astype(np.int64) @ _chi_local(m)) / float(1 << m)
    ok = np.ones(sub.shape[0], dtype=bool)
    for r in range(m):
        v = sub.reshape(sub.shape[0], (1 << m) // (2 << r), 2, 1 << r)
        ok &= np.any(v[:, :, 0, :] != v[:, :, 1, :], axis=(1, 2))
    return deriv * deriv, ok.astype(np.float64)


def estimate_coefficient(f: PointwiseFunction, i, samples: int, seed: int, threads: int = 1) -> Estimate:
    """Mean of f(x) chi_i(x) over uniform x."""
    _check_samples(samples)
    bits = as_index_set(i, f.n).bits()

    def chunk(pts):
        chi = np.prod(pts[:, bits].astype(np.int64), axis=1) if bits else 1
        return f.evaluate(pts).astype(np.int64) * chi

    return _run(f.n, samples, seed, chunk, threads)[0]


def estimate_t_influence(f: PointwiseFunction, i, samples: int, seed: int, threads: int = 1) -> Estimate:
    """Mean of (d_i f(x))^2, the derivative taken exactly on each sampled subcube."""
    _check_samples(samples)
    bits = _subcube_bits(f, i)
    return _run(f.n, samples, seed, lambda p: _derivative_and_joint(f.subcube_values(p, bits), len(bits))[0], threads)[0]


def estimate_joint_influence(f: PointwiseFunction, i, samples: int, seed: int, threads: int = 1) -> Estimate:
    """Fraction of sampled complement assignments on which every coordinate of i is pivotal."""
    _check_samples(samples)
    bits = _subcube_bits(f, i)
    if not bits:
        from .errors import EmptySet

        raise EmptySet("joint influence needs a non-empty set")
    return _run(f.n, samples, seed, lambda p: _derivative_and_joint(f.subcube_values(p, bits), len(bits))[1], threads)[0]


def estimate_influences_coupled(f: PointwiseFunction, i, samples: int, seed: int, threads: int = 1):
    """(joint, T-influence) estimates from the same sampled subcubes.

    A non-zero derivative forces every coordinate to be pivotal, so the joint
    indicator dominates the squared derivative sample by sample and the joint
    estimate is never below the T-influence estimate.
    """
    _check_samples(samples)
    bits = _subcube_bits(f, i)

    def chunk(p):
        sq, joint = _derivative_and_joint(f.subcube_values(p, bits), len(bits))
        return np.stack([joint, sq], axis=1)

    joint, t_inf = _run(f.n, samples, seed, chunk, threads, width=2)
    return joint, t_inf


def estimate_sign_probabilities(f: PointwiseFunction, samples: int, seed: int, threads: int = 1):
    """(P(f=+1), P(f=-1)); the two values sum to exactly 1."""
    _check_samples(samples)
    plus = _run(f.n, samples, seed, lambda p: f.evaluate(p) > 0, threads)[0]
    minus = Estimate(1.0 - plus.value, plus.stderr, plus.samples, plus.seed)
    return plus, minus


def estimate_joint_influences(f: PointwiseFunction, sets: Sequence[IndexSet], samples: int, seed: int):
    """Joint influence of many sets from one shared pool of sampled points.

    Estimates are individually unbiased but correlated across sets.
    """
    _check_samples(samples)
    bit_lists = [_subcube_bits(f, s) for s in sets]
    totals = [Moments() for _ in sets]
    for c, s in enumerate(range(0, samples, CHUNK)):
        pts = _chunk_points(f.n, seed, c, min(CHUNK, samples - s))
        counts = f.unset_counts(pts) if isinstance(f, TribeFunction) and f.blocks else None
        for k, bits in enumerate(bit_lists):
            if counts is not None:
                sub = f.subcube_values(pts, bits, counts=counts)
            else:
                sub = f.subcube_values(pts, bits)
            totals[k] = totals[k].merge(Moments.of(_derivative_and_joint(sub, len(bits))[1]))
    return [t.estimate(seed) for t in totals]


def estimate_low_level_weights(f: PointwiseFunction, max_level: int, samples: int, seed: int, batches: int = 20):
    """Unbiased estimates of 1 - f^(0)^2 and of sum_{1<=r<=max_level} W^{=r}(f).

    Each batch uses the U-statistic ``(S^2 - sum z^2) / (N (N-1))`` for every
    squared coefficient; the reported value is the mean over batches and the
    standard error is the spread of batch values.
    """
    _check_samples(samples)
    from itertools import combinations

    sets = [c for r in range(1, max_level + 1) for c in combinations(range(f.n), r)]
    per_batch = max(2, samples // batches)
    variance_vals = []
    low_vals = []
    for b in range(batches):
        pts = _chunk_points(f.n, seed, 1_000_000 + b, per_batch)
        vals = f.evaluate(pts).astype(np.float64)
        nb = vals.size
        s0 = vals.sum()
        mean_sq = (s0 * s0 - np.sum(vals * vals)) / (nb * (nb - 1))
        variance_vals.append(1.0 - mean_sq)
        acc = 0.0
        for level_sets in _batched(sets, 2048):
            chi = np.stack([np.prod(pts[:, list(c)].astype(np.float64), axis=1) for c in level_sets], axis=1)
            z = vals[:, None] * chi
            s = z.sum(axis=0)
            acc += float(np.sum((s * s - np.sum(z * z, axis=0)) / (nb * (nb - 1))))
        low_vals.append(acc)

    def summarize(values):
        arr = np.asarray(values)
        return Estimate(float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size)), per_batch * batches, seed)

    return summarize(variance_vals), summarize(low_vals), summarize(np.asarray(variance_vals) - np.asarray(low_vals))


def _batched(items, size):
    for s in range(0, len(items), size):
        yield items[s:s + size]


def write_csv(rows, path_or_file) -> None:
    """One row per (estimator, set, value, stderr, samples, seed)."""
    import csv

    header = ["estimator", "set", "value", "stderr", "samples", "seed"]

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for name, s, est in rows:
            label = " ".join(map(str, s.indices())) if isinstance(s, IndexSet) else str(s)
            w.writerow([name, label, repr(est.value), repr(est.stderr), est.samples, est.seed])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)
