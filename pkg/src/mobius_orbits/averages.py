"""Möbius-weighted averages along orbits, the circle sup estimator, and fits.

Summation is split into segments whose boundaries are the multiples of
``BLOCK`` (2^16) together with the requested checkpoints. Every segment is
summed with ``math.fsum`` (correctly rounded), and checkpoint totals are the
``fsum`` of the segment sums in index order. Segments may be evaluated on a
thread pool; the result does not depend on the number of workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .moebius import MoebiusTable
from .polyeval import IntPolynomial, eval_wrapped_array
from .torus import ONE, TWO_PI, Frac64

log = logging.getLogger(__name__)

BLOCK = 1 << 16
ZERO_THRESHOLD = 1e-15
DEFAULT_GRID = 1 << 16
DEFAULT_REFINE = 30
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

OrbitValues = Callable[[np.ndarray], np.ndarray]


class StreamExhaustedError(ValueError):
    pass


class DegenerateFitError(ValueError):
    pass


@dataclass
class AverageSeries:
    """S_N = (1/N) sum_{n <= N} w(n) v(n) at each checkpoint N."""

    checkpoints: list[int]
    partials: np.ndarray
    weight: str = "mobius"
    orbit: str = ""

    @property
    def sums(self) -> np.ndarray:
        return self.partials * np.asarray(self.checkpoints, dtype=np.float64)


@dataclass
class DecayReport:
    """Fit of log|S_N| = log C - A log log N."""

    A: float
    log_c: float
    rms: float
    n_min: int
    n_max: int
    used: int

    def line(self) -> str:
        return f"# fit: A={self.A:.17g}, logC={self.log_c:.17g}, rms={self.rms:.17g}"


def geometric_checkpoints(start: float, stop: float, factor: float) -> list[int]:
    """Checkpoints start, start*factor, ... up to stop (rounded, deduplicated)."""
    if start < 1 or stop < start or factor <= 1:
        raise ValueError("need 1 <= start <= stop and factor > 1")
    out = []
    k = 0
    while True:
        v = start * factor**k
        if v > stop * (1 + 1e-12):
            break
        n = int(round(v))
        if not out or n > out[-1]:
            out.append(n)
        k += 1
    return out


def _segments(checkpoints: Sequence[int], block: int = BLOCK) -> list[tuple[int, int]]:
    """Half-open index ranges [lo, hi) covering 1..max(checkpoints)."""
    top = checkpoints[-1]
    cuts = set(range(block, top + 1, block)) | set(checkpoints)
    cuts = sorted(c for c in cuts if c <= top)
    segs = []
    lo = 1
    for c in cuts:
        if c >= lo:
            segs.append((lo, c + 1))
            lo = c + 1
    return segs


def _map_segments(fn, segs, threads: int | None):
    if threads is None or threads <= 1 or len(segs) <= 1:
        return [fn(s) for s in segs]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, segs))


def _complex_fsum(x: np.ndarray) -> complex:
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return complex(math.fsum(x.real.tolist()), math.fsum(x.imag.tolist()))
    return complex(math.fsum(x.tolist()), 0.0)


def _check_checkpoints(checkpoints: Sequence[int]) -> list[int]:
    cps = [int(c) for c in checkpoints]
    if not cps or cps[0] < 1 or any(b <= a for a, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be a nonempty increasing list of positive integers")
    return cps


def weighted_average(
    weight: MoebiusTable | None,
    values: OrbitValues,
    checkpoints: Sequence[int],
    threads: int | None = None,
    orbit: str = "",
    available: int | None = None,
) -> AverageSeries:
    """Checkpointed averages of w(n) v(n) over 1 <= n <= N.

    ``weight`` is a Möbius table, or None for the unit weight. ``values`` maps an
    int64 array of indices n to the orbit values v(n). ``available`` caps how
    many terms the value stream can supply.
    """
    cps = _check_checkpoints(checkpoints)
    top = cps[-1]
    if available is not None and top > available:
        raise StreamExhaustedError(f"stream supplies {available} values, checkpoint {top} requested")
    if weight is not None and top > weight.limit:
        raise StreamExhaustedError(f"Möbius table covers n <= {weight.limit}, checkpoint {top} requested")
    segs = _segments(cps)

    def seg_sum(seg):
        lo, hi = seg
        if weight is None:
            ns = np.arange(lo, hi, dtype=np.int64)
            return _complex_fsum(values(ns))
        w = weight.values[lo:hi]
        nz = np.flatnonzero(w)
        if nz.size == 0:
            return 0j
        ns = (nz + lo).astype(np.int64)
        return _complex_fsum(w[nz] * values(ns))

    sums = _map_segments(seg_sum, segs, threads)
    partials = np.empty(len(cps), dtype=np.complex128)
    re_acc: list[float] = []
    im_acc: list[float] = []
    ci = 0
    for (lo, hi), s in zip(segs, sums):
        re_acc.append(s.real)
        im_acc.append(s.imag)
        if hi - 1 == cps[ci]:
            n = cps[ci]
            partials[ci] = complex(math.fsum(re_acc) / n, math.fsum(im_acc) / n)
            ci += 1
    return AverageSeries(cps, partials, "mobius" if weight is not None else "unit", orbit)


# --- circle sup estimate ----------------------------------------------------


@dataclass
class SupEstimate:
    """Best θ found and |(1/N) sum μ(n) e(p(n) θ)| there (a lower bound for the sup)."""

    theta: Frac64
    value: float
    N: int
    grid: int
    refine: int
    grid_value: float


def exp_sum(table: MoebiusTable, p: IntPolynomial, N: int, theta: Frac64, threads: int | None = None) -> complex:
    """(1/N) sum_{n <= N} μ(n) e(p(n) θ), phases reduced exactly on the 2^-64 grid."""
    if not 1 <= N <= table.limit:
        raise IndexError(f"N={N} outside sieved range [1, {table.limit}]")
    th = np.uint64(theta.raw)

    def seg_sum(seg):
        lo, hi = seg
        w = table.values[lo:hi]
        nz = np.flatnonzero(w)
        if nz.size == 0:
            return 0j
        ph = eval_wrapped_array(p, nz + lo) * th
        ang = TWO_PI * (ph.astype(np.float64) * (1.0 / ONE))
        ww = w[nz].astype(np.float64)
        return complex(math.fsum((ww * np.cos(ang)).tolist()), math.fsum((ww * np.sin(ang)).tolist()))

    parts = _map_segments(seg_sum, _segments([N]), threads)
    return complex(math.fsum(c.real for c in parts) / N, math.fsum(c.imag for c in parts) / N)


def _residues_mod(p: IntPolynomial, ns: np.ndarray, G: int) -> np.ndarray:
    if G & (G - 1) == 0:
        return (eval_wrapped_array(p, ns) & np.uint64(G - 1)).astype(np.int64)
    acc = np.zeros(ns.shape, dtype=np.int64)
    nm = ns.astype(np.int64) % G
    for c in reversed(p.coeffs):
        acc = (acc * nm + c % G) % G
    return acc


def grid_exp_sums(table: MoebiusTable, p: IntPolynomial, N: int, G: int, threads: int | None = None) -> np.ndarray:
    """|(1/N) sum μ(n) e(p(n) j / G)| for j = 0 .. G-1.

    e(p(n) j/G) depends only on p(n) mod G, so the μ-weights are first folded
    into G residue classes (exact integer histogram) and the G-point sums are
    then one discrete Fourier transform of that histogram.
    """
    if G < 2 or G > 1 << 30:
        raise ValueError("grid size must be in [2, 2^30]")
    if G * G < 0:  # pragma: no cover
        raise OverflowError

    def seg_hist(seg):
        lo, hi = seg
        w = table.values[lo:hi]
        nz = np.flatnonzero(w)
        r = _residues_mod(p, (nz + lo).astype(np.int64), G)
        return np.bincount(r, weights=w[nz].astype(np.float64), minlength=G).astype(np.int64)

    hist = np.zeros(G, dtype=np.int64)
    for h in _map_segments(seg_hist, _segments([N]), threads):
        hist += h
    return np.abs(np.fft.fft(hist.astype(np.float64))) / N


def _golden_max(f, a: float, b: float, iters: int):
    """Golden-section search for a maximum of f on [a, b]; returns all (x, f(x)) evaluated."""
    seen = []
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    seen += [(c, fc), (d, fd)]
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            seen.append((c, fc))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            seen.append((d, fd))
    return seen


def _frac_of(t: float) -> Frac64:
    t = t % 1.0
    return Frac64(round(t * ONE) & ((1 << 64) - 1))


def davenport_sup(
    table: MoebiusTable,
    p: IntPolynomial,
    N: int,
    grid_size: int = DEFAULT_GRID,
    refine_iters: int = DEFAULT_REFINE,
    threads: int | None = None,
) -> SupEstimate:
    """Lower bound for sup over θ of |(1/N) sum μ(n) e(p(n) θ)|.

    Scans the uniform grid j/G, then refines around the best cell by golden
    section. The reported value is re-evaluated directly at the returned θ.
    """
    if not 1 <= N <= table.limit:
        raise IndexError(f"N={N} outside sieved range [1, {table.limit}]")
    grid = grid_exp_sums(table, p, N, grid_size, threads)
    j = int(np.argmax(grid))
    best_theta = _frac_of(j / grid_size) if grid_size & (grid_size - 1) else Frac64(j * (ONE // grid_size))
    best = abs(exp_sum(table, p, N, best_theta, threads))
    if refine_iters > 0:
        cache: dict[int, float] = {}

        def f(t):
            th = _frac_of(t)
            if th.raw not in cache:
                cache[th.raw] = abs(exp_sum(table, p, N, th, threads))
            return cache[th.raw]

        step = 1.0 / grid_size
        for t, v in _golden_max(f, j * step - step, j * step + step, refine_iters):
            if v > best:
                best, best_theta = v, _frac_of(t)
    return SupEstimate(best_theta, best, N, grid_size, refine_iters, float(grid[j]))


@dataclass
class SupSeries:
    """Sup estimates at several N; quacks like AverageSeries for decay_fit."""

    checkpoints: list[int]
    partials: np.ndarray
    estimates: list[SupEstimate] = field(default_factory=list)
    weight: str = "mobius"
    orbit: str = ""


def davenport_series(
    table: MoebiusTable,
    p: IntPolynomial,
    checkpoints: Sequence[int],
    grid_size: int = DEFAULT_GRID,
    refine_iters: int = DEFAULT_REFINE,
    threads: int | None = None,
) -> SupSeries:
    cps = _check_checkpoints(checkpoints)
    ests = [davenport_sup(table, p, N, grid_size, refine_iters, threads) for N in cps]
    return SupSeries(cps, np.array([e.value for e in ests]), ests, orbit=f"sup-circle p={p.spec()}")


def decay_fit(series) -> DecayReport:
    """Least squares of log|S_N| on log log N; A is the negated slope."""
    ns = np.asarray(series.checkpoints, dtype=np.float64)
    mags = np.abs(np.asarray(series.partials))
    keep = mags >= ZERO_THRESHOLD
    if not keep.all():
        log.warning("decay_fit: dropping %d checkpoints with |S_N| < %g", int((~keep).sum()), ZERO_THRESHOLD)
    ns, mags = ns[keep], mags[keep]
    if len(ns) < 4:
        raise DegenerateFitError(f"need >= 4 usable checkpoints, have {len(ns)}")
    x = np.log(np.log(ns))
    y = np.log(mags)
    design = np.column_stack([np.ones_like(x), x])
    (log_c, slope), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (log_c + slope * x)
    rms = float(np.sqrt(np.mean(resid**2)))
    return DecayReport(float(-slope), float(log_c), rms, int(ns[0]), int(ns[-1]), len(ns))


# --- two-prime correlations -------------------------------------------------


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, math.isqrt(q) + 1))


def kbsz_correlation(values: OrbitValues, q1: int, q2: int, N: int, threads: int | None = None) -> complex:
    """(1/N) sum_{n <= N} v(n q1) conj(v(n q2))."""
    if q1 == q2:
        raise ValueError("q1 and q2 must be distinct primes")
    if not (_is_prime(q1) and _is_prime(q2)):
        raise ValueError(f"{q1}, {q2} must both be prime")
    if N < 1:
        raise ValueError("N must be positive")

    def seg_sum(seg):
        ns = np.arange(seg[0], seg[1], dtype=np.int64)
        return _complex_fsum(np.asarray(values(ns * q1)) * np.conj(np.asarray(values(ns * q2))))

    parts = _map_segments(seg_sum, _segments([N]), threads)
    return complex(math.fsum(c.real for c in parts) / N, math.fsum(c.imag for c in parts) / N)


# --- equidistribution -----------------------------------------------------


def star_discrepancy(samples) -> float:
    """Exact D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N) for points on the 2^-64 grid.

    Accepts Frac64 values or raw uint64 integers. Candidates are located in
    floating point, then the leading ones are re-evaluated in exact integer
    arithmetic, so the result is the correctly rounded discrepancy.
    """
    if isinstance(samples, np.ndarray) and samples.dtype == np.uint64:
        raw = np.sort(samples)
    else:
        raw = np.sort(np.array([s.raw if isinstance(s, Frac64) else int(s) for s in samples], dtype=np.uint64))
    N = len(raw)
    if N == 0:
        raise ValueError("star discrepancy of an empty sample")
    x = raw.astype(np.float64) * (1.0 / ONE)
    i = np.arange(1, N + 1, dtype=np.float64)
    upper = i / N - x
    lower = x - (i - 1) / N
    approx = np.maximum(upper, lower)
    top = float(approx.max())
    cand = np.flatnonzero(approx >= top - 1e-9)
    best_num = None
    # value = num / (N 2^64)
    for idx in cand.tolist():
        r = int(raw[idx])
        k = idx + 1
        num = max(k * ONE - N * r, N * r - (k - 1) * ONE)
        if best_num is None or num > best_num:
            best_num = num
    return best_num / (N * ONE)
