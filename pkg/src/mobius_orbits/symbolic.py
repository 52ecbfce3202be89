"""The square-supported Möbius subshift point and its factor complexity.

Metric on {-1,0,1}^{N0}: d(x, y) = 2^-min{i : x_i != y_i}. Under it two orbit
segments of length n are (n, 2^-k)-distinguishable exactly when the words of
length n + k starting at those points differ, so the count of
distinguishable segments equals the number of distinct factors of length
L = n + k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .moebius import MoebiusTable
from .polyeval import IntPolynomial, eval_exact, eval_exact_array

ALPHABET = (-1, 0, 1)
_DUMP_CHARS = {-1: "-", 0: "0", 1: "+"}


class InsufficientTableError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SymbolSequence:
    """Materialized prefix a_0 .. a_{M-1} over a small alphabet."""

    data: np.ndarray
    alphabet: tuple[int, ...] = ALPHABET

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.int8)
        if not np.isin(data, self.alphabet).all():
            raise ValueError("sequence contains symbols outside the alphabet")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def length(self) -> int:
        return len(self.data)

    def __len__(self) -> int:
        return self.length

    def values_at(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx)
        if idx.size and (idx.min() < 0 or idx.max() >= self.length):
            raise IndexError(f"orbit index outside materialized prefix of length {self.length}")
        return self.data[idx.astype(np.int64)]

    def dense(self) -> "SymbolSequence":
        return self


@dataclass(frozen=True, eq=False)
class SquareSupportSequence:
    """a_n = μ(k) if n = k^2 with k >= 1, else 0, for 0 <= n < length.

    Only the square positions carry information, so this stores nothing but
    the Möbius table and answers a_n by an integer square root. It is the same
    point as ``counterexample_sequence`` without materializing ~N^2 zeros.
    """

    table: MoebiusTable
    length: int
    alphabet: tuple[int, ...] = field(default=ALPHABET)

    def __post_init__(self):
        need = math.isqrt(max(self.length - 1, 0))
        if need > self.table.limit:
            raise InsufficientTableError(f"prefix of length {self.length} needs μ up to {need}")

    def __len__(self) -> int:
        return self.length

    def values_at(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx)
        if idx.size == 0:
            return np.zeros(0, dtype=np.int8)
        if idx.dtype == object:
            if min(idx) < 0 or max(idx) >= self.length:
                raise IndexError(f"orbit index outside prefix of length {self.length}")
            roots = np.array([math.isqrt(int(i)) for i in idx], dtype=np.int64)
            square = np.array([r * r == int(i) for r, i in zip(roots.tolist(), idx)], dtype=bool)
        else:
            idx = idx.astype(np.int64)
            if idx.min() < 0 or idx.max() >= self.length:
                raise IndexError(f"orbit index outside prefix of length {self.length}")
            roots = np.floor(np.sqrt(idx.astype(np.float64))).astype(np.int64)
            # float sqrt may be off by one near large squares
            roots -= roots * roots > idx
            roots += (roots + 1) * (roots + 1) <= idx
            square = roots * roots == idx
        out = np.zeros(idx.shape, dtype=np.int8)
        hit = square & (roots >= 1)
        out[hit] = self.table.values[roots[hit]]
        return out

    def dense(self) -> SymbolSequence:
        return counterexample_sequence(self.length, self.table)


def counterexample_sequence(M: int, table: MoebiusTable) -> SymbolSequence:
    """Prefix of length M of the point a with a_{k^2} = μ(k) (k >= 1), zero elsewhere; a_0 = 0."""
    if M < 1:
        raise ValueError("M must be positive")
    kmax = math.isqrt(M - 1)
    if kmax > table.limit:
        raise InsufficientTableError(f"prefix of length {M} needs μ up to {kmax}, table has {table.limit}")
    data = np.zeros(M, dtype=np.int8)
    ks = np.arange(1, kmax + 1, dtype=np.int64)
    data[ks * ks] = table.values[1 : kmax + 1]
    return SymbolSequence(data)


def shift_orbit_value(a, p: IntPolynomial, n: int) -> int:
    """f(T^{p(n)} a) with f(x) = x_0, i.e. the symbol a_{p(n)}."""
    idx = eval_exact(p, n)
    if not 0 <= idx < len(a):
        raise IndexError(f"p({n}) = {idx} outside prefix of length {len(a)}")
    return int(a.values_at(np.array([idx]))[0])


def shift_orbit_values(a, p: IntPolynomial, ns: np.ndarray) -> np.ndarray:
    return a.values_at(eval_exact_array(p, ns))


def factor_classes(data: np.ndarray, L: int, _cache: dict | None = None) -> np.ndarray:
    """Dense class label for each window data[i : i+L], i = 0 .. M-L.

    Two windows get the same label iff they are equal as words. Labels for
    length a + b are built from the pair (label_a[i], label_b[i + a]), so every
    identification is exact (no hashing).
    """
    M = len(data)
    if not 1 <= L <= M:
        raise ValueError(f"factor length {L} outside [1, {M}]")
    cache = {} if _cache is None else _cache
    if L in cache:
        return cache[L]
    if L == 1:
        _, labels = np.unique(data, return_inverse=True)
        labels = labels.astype(np.int64)
    else:
        half = 1 << (L.bit_length() - 1)
        if half == L:
            half //= 2
        rest = L - half
        left = factor_classes(data, half, cache)
        right = factor_classes(data, rest, cache)
        count = M - L + 1
        base = int(right.max()) + 1
        keys = left[:count] * base + right[half : half + count]
        labels, _ = pd.factorize(keys, sort=False)
        labels = labels.astype(np.int64)
    cache[L] = labels
    return labels


def distinct_factors(a, L: int) -> int:
    """Number of distinct words of length L occurring in the materialized prefix."""
    data = a.dense().data
    return int(factor_classes(data, L).max()) + 1


def distinct_factors_many(a, lengths) -> dict[int, int]:
    data = a.dense().data
    cache: dict = {}
    return {L: int(factor_classes(data, L, cache).max()) + 1 for L in lengths}


def first_zero_run(a, runlen: int) -> int | None:
    """Smallest i with a_i = ... = a_{i+runlen-1} = 0, or None if the prefix has none."""
    data = a.dense().data
    if not 1 <= runlen <= len(data):
        raise ValueError(f"run length {runlen} outside [1, {len(data)}]")
    nz = np.flatnonzero(data)
    starts = np.concatenate(([0], nz + 1))
    ends = np.concatenate((nz, [len(data)]))
    ok = np.flatnonzero(ends - starts >= runlen)
    return int(starts[ok[0]]) if ok.size else None


@dataclass
class EntropyReport:
    lengths: list[int]
    counts: list[int]
    slope: float
    intercept: float


def entropy_growth_report(a, lengths) -> EntropyReport:
    """Distinct-factor counts and the least-squares slope of log count against log L.

    A slope bounded by ~2 means polynomial (subexponential) complexity.
    """
    lengths = sorted(int(L) for L in lengths)
    if len(lengths) < 3:
        raise ValueError("need at least 3 factor lengths for a growth fit")
    if lengths[-1] > len(a) // 2:
        raise ValueError(f"largest length {lengths[-1]} exceeds half the prefix ({len(a)})")
    counts = distinct_factors_many(a, lengths)
    c = [counts[L] for L in lengths]
    slope, intercept = np.polyfit(np.log(lengths), np.log(c), 1)
    return EntropyReport(lengths, c, float(slope), float(intercept))


def dump_sequence(a, path: str | Path) -> None:
    """One byte per symbol: '-', '0', '+'."""
    data = a.dense().data
    lut = np.frombuffer(b"-0+", dtype=np.uint8)
    Path(path).write_bytes(lut[data.astype(np.int64) + 1].tobytes())
