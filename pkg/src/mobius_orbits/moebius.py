"""Möbius function sieve and the number-theoretic baselines built on it.

The sieve is a linear (Euler) sieve driven by a smallest-prime-factor array,
so every composite is visited exactly once and construction is O(N).

Memory: ``values`` costs 1 byte per entry (int8) and ``mertens`` 8 bytes
(int64). During construction the smallest-prime-factor array adds 4 bytes per
entry and the prime list about 4 * N / log N bytes, so the peak is roughly
13 bytes per entry (~130 MB at N = 10^7, ~1.3 GB at N = 10^8).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

MAX_LIMIT = 2**31
BUILD_BYTES_PER_ENTRY = 13
DEFAULT_MEMORY_BUDGET = 4 * 2**30

CACHE_MAGIC = b"MOBT"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sIQ")


class SieveLimitError(MemoryError):
    """Requested sieve limit exceeds the hard cap or the memory budget."""


@numba.njit(cache=True)
def _linear_sieve(limit):
    mu = np.zeros(limit + 1, dtype=np.int8)
    spf = np.zeros(limit + 1, dtype=np.int32)
    primes = np.empty(max(16, int(1.3 * limit / max(math.log(limit), 1.0)) + 16), dtype=np.int32)
    count = 0
    if limit >= 1:
        mu[1] = 1
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            mu[i] = -1
            primes[count] = i
            count += 1
        si = spf[i]
        for j in range(count):
            p = primes[j]
            if p > si or p * i > limit:
                break
            spf[p * i] = p
            if p == si:
                mu[p * i] = 0
            else:
                mu[p * i] = -mu[i]
    return mu


@dataclass(frozen=True, eq=False)
class MoebiusTable:
    """Sieved μ(0..limit) with Mertens prefix sums.

    Index 0 is a placeholder (μ(0) := 0, M(0) = 0) so that ``values[n]`` is
    μ(n). Both arrays are made read-only on construction.
    """

    limit: int
    values: np.ndarray
    mertens: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)
        self.mertens.setflags(write=False)

    def mu(self, n: int) -> int:
        _check_range(self, n)
        return int(self.values[n])

    @classmethod
    def from_values(cls, values: np.ndarray) -> "MoebiusTable":
        values = np.ascontiguousarray(values, dtype=np.int8)
        mertens = np.cumsum(values, dtype=np.int64)
        return cls(limit=len(values) - 1, values=values, mertens=mertens)


def build_moebius_table(limit: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> MoebiusTable:
    if limit < 1:
        raise ValueError(f"sieve limit must be >= 1, got {limit}")
    if limit > MAX_LIMIT:
        raise SieveLimitError(f"sieve limit {limit} exceeds hard cap 2^31")
    need = BUILD_BYTES_PER_ENTRY * (limit + 1)
    if need > memory_budget:
        raise SieveLimitError(
            f"sieve limit {limit} needs ~{need / 2**20:.0f} MiB, budget is {memory_budget / 2**20:.0f} MiB"
        )
    return MoebiusTable.from_values(_linear_sieve(limit))


def _check_range(table: MoebiusTable, n: int) -> None:
    if not 1 <= n <= table.limit:
        raise IndexError(f"n={n} outside sieved range [1, {table.limit}]")


def mertens(table: MoebiusTable, n: int) -> int:
    """M(n) = sum of μ(k) for k <= n."""
    _check_range(table, n)
    return int(table.mertens[n])


def squarefree_density(table: MoebiusTable, n: int) -> float:
    """(1/n) * #{k <= n : k squarefree}; tends to 6/π²."""
    _check_range(table, n)
    count = np.count_nonzero(table.values[1 : n + 1])
    return count / n


def mobius_oracle(n: int) -> int:
    """μ(n) by trial division. Independent of the sieve; meant for tests."""
    if n < 1:
        raise ValueError("n must be positive")
    sign = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            sign = -sign
        d += 1 if d == 2 else 2
    if n > 1:
        sign = -sign
    return sign


def divisor_mu_sum(n: int) -> int:
    """Sum of μ(d) over the divisors d of n (1 for n = 1, else 0)."""
    if n < 1:
        raise ValueError("n must be positive")
    total = 0
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            total += mobius_oracle(d)
            if d * d != n:
                total += mobius_oracle(n // d)
    return total


def save_cache(table: MoebiusTable, path: str | Path) -> None:
    """Write the binary cache: ``MOBT``, u32 version, u64 limit (little endian), then int8 values."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, table.limit))
        # values[1..limit]; index 0 is implicit
        fh.write(np.ascontiguousarray(table.values[1:]).tobytes())


def load_cache(path: str | Path) -> MoebiusTable:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, limit = _HEADER.unpack(header)
        if magic != CACHE_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != CACHE_VERSION:
            raise ValueError(f"{path}: unsupported cache version {version}")
        body = np.fromfile(fh, dtype=np.int8, count=limit)
    if len(body) != limit:
        raise ValueError(f"{path}: expected {limit} entries, found {len(body)}")
    values = np.empty(limit + 1, dtype=np.int8)
    values[0] = 0
    values[1:] = body
    return MoebiusTable.from_values(values)


def load_or_build(limit: int, cache: str | Path | None = None) -> MoebiusTable:
    """Load a cached table covering ``limit`` or sieve one (and save it when a cache path is given)."""
    if cache is not None and Path(cache).exists():
        table = load_cache(cache)
        if table.limit >= limit:
            return table
    table = build_moebius_table(limit)
    if cache is not None:
        save_cache(table, cache)
    return table
