"""Integer polynomials evaluated exactly, modulo 2^64, and by finite differences.

Orbit indices are averaged over 1 <= n <= N throughout; n = 0 is never part
of an average.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

MASK64 = (1 << 64) - 1
_I128_MAX = (1 << 127) - 1
_I128_MIN = -(1 << 127)
# int64 Horner is safe while every partial stays below this in absolute value
_INT64_SAFE = 1 << 62


class PolynomialOverflowError(OverflowError):
    pass


@dataclass(frozen=True)
class IntPolynomial:
    """p(n) = c0 + c1 n + ... + cd n^d with integer coefficients, low to high."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Sequence[int]):
        cs = [int(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs) if cs else (0,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        """Parse ``"c0,c1,...,cd"`` (low to high), e.g. ``"0,0,1"`` is n^2."""
        parts = [s.strip() for s in text.split(",")]
        if not parts or any(not s for s in parts):
            raise ValueError(f"bad polynomial spec {text!r}")
        try:
            return cls([int(s) for s in parts])
        except ValueError:
            raise ValueError(f"bad polynomial spec {text!r}: coefficients must be integers") from None

    def spec(self) -> str:
        return ",".join(str(c) for c in self.coeffs)

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0 and self.degree:
                continue
            terms.append(str(c) if i == 0 else f"{c}*n" if i == 1 else f"{c}*n^{i}")
        return " + ".join(terms) or "0"

    def __call__(self, n: int) -> int:
        return eval_exact(self, n)


def eval_exact(p: IntPolynomial, n: int) -> int:
    """Exact p(n) by Horner; raises if any partial leaves the signed 128-bit range."""
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * n + c
        if not _I128_MIN <= acc <= _I128_MAX:
            raise PolynomialOverflowError(f"p({n}) leaves the 128-bit range; use eval_wrapped")
    return acc


def eval_wrapped(p: IntPolynomial, n: int) -> int:
    """p(n) mod 2^64 as an unsigned integer."""
    n &= MASK64
    acc = 0
    for c in reversed(p.coeffs):
        acc = (acc * n + c) & MASK64
    return acc


def eval_wrapped_array(p: IntPolynomial, n: np.ndarray) -> np.ndarray:
    """Vectorized eval_wrapped; numpy uint64 arithmetic wraps mod 2^64."""
    n = np.asarray(n).astype(np.uint64)
    acc = np.zeros(n.shape, dtype=np.uint64)
    for c in reversed(p.coeffs):
        acc *= n
        acc += np.uint64(c & MASK64)
    return acc


def _abs_bound(p: IntPolynomial, n_max: int) -> int:
    return sum(abs(c) * n_max**i for i, c in enumerate(p.coeffs))


def eval_exact_array(p: IntPolynomial, n: np.ndarray) -> np.ndarray:
    """Vectorized eval_exact for nonnegative n.

    Returns int64 when every value provably fits, otherwise an object array of
    Python ints.
    """
    n = np.asarray(n)
    if n.size == 0:
        return np.zeros(0, dtype=np.int64)
    n_max = int(n.max())
    if _abs_bound(p, n_max) < _INT64_SAFE:
        n64 = n.astype(np.int64)
        acc = np.zeros(n.shape, dtype=np.int64)
        for c in reversed(p.coeffs):
            acc *= n64
            acc += c
        return acc
    return np.array([eval_exact(p, int(k)) for k in n.ravel()], dtype=object).reshape(n.shape)


class StreamEvaluator:
    """Successive values p(n0), p(n0+1), ... mod 2^64 via a forward-difference table.

    Each step costs ``degree`` wrapping additions; a constant polynomial needs none.
    """

    def __init__(self, p: IntPolynomial, n_start: int = 0):
        self.poly = p
        d = p.degree
        # forward differences Δ^j p(n0), j = 0..d, from d+1 direct evaluations
        vals = [eval_wrapped(p, n_start + k) for k in range(d + 1)]
        diffs = []
        for _ in range(d + 1):
            diffs.append(vals[0])
            vals = [(vals[i + 1] - vals[i]) & MASK64 for i in range(len(vals) - 1)]
        self._diffs = diffs
        self.n = n_start & MASK64

    @property
    def depth(self) -> int:
        return len(self._diffs) - 1

    def __iter__(self) -> Iterator[int]:
        return self

    def __next__(self) -> int:
        diffs = self._diffs
        out = diffs[0]
        for j in range(len(diffs) - 1):
            diffs[j] = (diffs[j] + diffs[j + 1]) & MASK64
        self.n = (self.n + 1) & MASK64
        return out


def stream_evaluator(p: IntPolynomial, n_start: int = 0) -> StreamEvaluator:
    return StreamEvaluator(p, n_start)


def nonneg_on_range(p: IntPolynomial, n_max: int) -> bool:
    """True iff p(n) >= 0 for every 1 <= n <= n_max (direct scan)."""
    if n_max < 1:
        raise ValueError("range must contain n = 1")
    if _abs_bound(p, n_max) > _I128_MAX:
        # surfaces the overflow exactly like eval_exact would
        eval_exact(p, n_max)
    block = 1 << 20
    for lo in range(1, n_max + 1, block):
        ns = np.arange(lo, min(lo + block, n_max + 1), dtype=np.int64)
        vals = eval_exact_array(p, ns)
        if (vals < 0).any():
            return False
    return True
