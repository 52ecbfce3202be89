"""Circle rotations on a 2^-64 grid and a Heisenberg nilsystem.

A point of R/Z is stored as an unsigned 64-bit integer ``raw`` standing for
raw / 2^64. Addition and integer scaling wrap mod 2^64, which is exactly the
group law of R/Z restricted to the grid, so rotation orbits carry no
floating-point drift at all.

The Heisenberg group is realised with the law

    (x, y, z) * (x', y', z') = (x + x', y + y', z + z' + x y')

and the integer lattice Z^3. Points of the nilmanifold are kept in the
fundamental domain [0,1)^3; x and y live on the 2^-64 grid, z is a double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from .polyeval import MASK64, IntPolynomial, eval_exact, eval_exact_array, eval_wrapped, eval_wrapped_array

ONE = 1 << 64
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, order=True)
class Frac64:
    raw: int

    def __post_init__(self):
        if not 0 <= self.raw <= MASK64:
            raise ValueError(f"raw value {self.raw} outside [0, 2^64)")

    def __float__(self) -> float:
        return self.raw / ONE

    def __add__(self, other: "Frac64") -> "Frac64":
        return Frac64((self.raw + other.raw) & MASK64)

    def __neg__(self) -> "Frac64":
        return Frac64(-self.raw & MASK64)

    def __sub__(self, other: "Frac64") -> "Frac64":
        return Frac64((self.raw - other.raw) & MASK64)

    def scale(self, m: int) -> "Frac64":
        return Frac64((self.raw * (m & MASK64)) & MASK64)

    def as_fraction(self) -> Fraction:
        return Fraction(self.raw, ONE)


def frac_from_real(t: float) -> Frac64:
    """Nearest grid point to t in [0, 1)."""
    if not 0.0 <= t < 1.0:
        raise ValueError(f"{t} is not in [0, 1)")
    return Frac64(round(Fraction(t) * ONE) & MASK64)


def _round_sqrt_scaled(n: int, shift: int) -> int:
    """round(sqrt(n) * 2^shift), exactly."""
    target = n << (2 * shift)
    r = math.isqrt(target)
    # round up iff (r + 1/2)^2 <= target, i.e. (2r+1)^2 <= 4 target
    return r + 1 if (2 * r + 1) ** 2 <= 4 * target else r


def _frac_of_decimal(text: str) -> Frac64:
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(text)
        d = d - d.to_integral_value(rounding="ROUND_FLOOR")
        return Frac64(int((d * ONE).to_integral_value(rounding="ROUND_HALF_EVEN")) & MASK64)


def named_angle(name: str) -> Frac64:
    """Fractional part of a named constant or a decimal literal, on the grid.

    Names: golden (frac of the golden ratio), sqrt2, sqrt3, sqrt5, sqrt7.
    """
    if name == "golden":
        # frac(phi) = (sqrt5 - 1) / 2
        return Frac64((_round_sqrt_scaled(5, 63) - (1 << 63)) & MASK64)
    if name.startswith("sqrt") and name[4:].isdigit():
        n = int(name[4:])
        s = math.isqrt(n)
        return Frac64((_round_sqrt_scaled(n, 64) - s * ONE) & MASK64)
    try:
        return _frac_of_decimal(name)
    except Exception:
        raise ValueError(f"unknown angle {name!r}") from None


GOLDEN = named_angle("golden")


def rotation_angle(name: str) -> Frac64:
    """named_angle with the lowest raw bit forced on (a shift of at most 2^-64).

    Odd raw angles have full order 2^64, the grid stand-in for irrationality.
    """
    return Frac64(named_angle(name).raw | 1)


@dataclass(frozen=True)
class RotationSystem:
    """x -> x + alpha on R/Z. An odd raw angle has full order 2^64 on the grid."""

    alpha: Frac64
    tag: str = ""

    def __post_init__(self):
        if self.alpha.raw % 2 == 0:
            raise ValueError("rotation angle must have odd raw value (full order on the grid)")

    def step(self, x: Frac64) -> Frac64:
        return x + self.alpha


def rotation_orbit_point(sys: RotationSystem, x0: Frac64, p: IntPolynomial, n: int) -> Frac64:
    """T^{p(n)} x0 = x0 + p(n) alpha, exact on the grid."""
    return Frac64((x0.raw + eval_wrapped(p, n) * sys.alpha.raw) & MASK64)


def rotation_orbit_raw(sys: RotationSystem, x0: Frac64, p: IntPolynomial, ns: np.ndarray) -> np.ndarray:
    steps = eval_wrapped_array(p, ns)
    steps *= np.uint64(sys.alpha.raw)
    steps += np.uint64(x0.raw)
    return steps


def _phase(raw) -> np.ndarray:
    # raw / 2^64 as a double in [0, 1); uint64 -> float64 rounds once
    return np.asarray(raw, dtype=np.uint64).astype(np.float64) * (1.0 / ONE)


def character(k: int, x: Frac64) -> complex:
    """e(k x), with k x reduced mod 1 on the grid before any trigonometry."""
    t = ((k & MASK64) * x.raw & MASK64) / ONE
    ang = TWO_PI * t
    return complex(math.cos(ang), math.sin(ang))


def character_array(k: int, raw: np.ndarray) -> np.ndarray:
    prod = np.asarray(raw, dtype=np.uint64) * np.uint64(k & MASK64)
    ang = TWO_PI * _phase(prod)
    return np.cos(ang) + 1j * np.sin(ang)


# --- Heisenberg nilsystem -------------------------------------------------

MASK128 = (1 << 128) - 1


def _unit_frac(num: int, bits: int) -> float:
    """(num mod 2^bits) / 2^bits as a double in [0, 1)."""
    v = (num & ((1 << bits) - 1)) / (1 << bits)
    return 0.0 if v >= 1.0 else v


def _add_mod1(*terms: float) -> float:
    v = math.fsum(terms) % 1.0
    return 0.0 if v >= 1.0 else v


@dataclass(frozen=True)
class HeisenbergPoint:
    """Group element (x, y, z) with x = x_raw / 2^64 and y = y_raw / 2^64.

    ``x_raw`` and ``y_raw`` are unbounded integers, so products and powers of
    grid elements are exact. z is kept modulo 1: the central lattice elements
    (0, 0, l) commute with everything, so dropping them never changes a coset.
    The point is canonical (in the fundamental domain) when both raws lie in
    [0, 2^64).
    """

    x_raw: int
    y_raw: int
    z: float

    @classmethod
    def from_reals(cls, x: float, y: float, z: float) -> "HeisenbergPoint":
        return cls(round(Fraction(x) * ONE), round(Fraction(y) * ONE), _add_mod1(z))

    @property
    def x(self) -> Frac64:
        return Frac64(self.x_raw)

    @property
    def y(self) -> Frac64:
        return Frac64(self.y_raw)

    @property
    def is_canonical(self) -> bool:
        return 0 <= self.x_raw < ONE and 0 <= self.y_raw < ONE and 0.0 <= self.z < 1.0

    def as_tuple(self) -> tuple[float, float, float]:
        return self.x_raw / ONE, self.y_raw / ONE, self.z


HEIS_IDENTITY = HeisenbergPoint(0, 0, 0.0)


def heis_lattice(j: int, k: int) -> HeisenbergPoint:
    """The lattice element (j, k, 0)."""
    return HeisenbergPoint(j * ONE, k * ONE, 0.0)


def heis_mul(g: HeisenbergPoint, h: HeisenbergPoint) -> HeisenbergPoint:
    """(x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y'); x y' mod 1 taken exactly."""
    cross = _unit_frac(g.x_raw * h.y_raw, 128)
    return HeisenbergPoint(g.x_raw + h.x_raw, g.y_raw + h.y_raw, _add_mod1(g.z, h.z, cross))


def heis_reduce(g: HeisenbergPoint) -> HeisenbergPoint:
    """Canonical representative of g Γ.

    Right multiplication by (j, k, l) in Z^3 maps (x, y, z) to
    (x + j, y + k, z + l + x k); choose j, k to bring x, y into [0, 1).
    """
    x_red = g.x_raw & MASK64
    k = -(g.y_raw >> 64)
    z = _add_mod1(g.z, _unit_frac(x_red * k, 64))
    return HeisenbergPoint(x_red, g.y_raw & MASK64, z)


def heis_reduce_coords(x, y, z) -> tuple[Fraction, Fraction, Fraction]:
    """heis_reduce for arbitrary real coordinates, in exact rational arithmetic."""
    x, y, z = Fraction(x), Fraction(y), Fraction(z)
    x -= math.floor(x)
    k = -math.floor(y)
    y += k
    z += x * k
    z -= math.floor(z)
    return x, y, z


def heis_pow(a: HeisenbergPoint, m: int) -> HeisenbergPoint:
    """a^m in closed form: (m α, m β, m γ + C(m, 2) α β).

    With α = A/2^64, β = B/2^64 the cross term is C(m,2) A B / 2^128 and is
    reduced mod 1 exactly; m γ mod 1 is exact in rationals. Only the final z
    is rounded. The result is the exact group element (not reduced by Γ).
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    cross = _unit_frac((m * (m - 1) // 2) * a.x_raw * a.y_raw, 128)
    mg = Fraction(a.z) * m
    return HeisenbergPoint(m * a.x_raw, m * a.y_raw, _add_mod1(float(mg - math.floor(mg)), cross))


def heis_orbit_point(a: HeisenbergPoint, g0: HeisenbergPoint, p: IntPolynomial, n: int) -> HeisenbergPoint:
    """a^{p(n)} g0 Γ in canonical coordinates.

    The exponent is the exact p(n) (it must be >= 0): the z coordinate of a^m
    is not periodic in m modulo 2^64, so the wrapped value would be wrong.
    """
    m = eval_exact(p, n)
    if m < 0:
        raise ValueError(f"p({n}) = {m} is negative")
    return heis_reduce(heis_mul(heis_pow(a, m), g0))


def heis_orbit_arrays(a: HeisenbergPoint, g0: HeisenbergPoint, p: IntPolynomial, ns: np.ndarray):
    """heis_orbit_point over many n: (x raw uint64, y raw uint64, z float64) arrays.

    Same arithmetic as the scalar path, fused into one integer numerator over 2^128.
    """
    ms = eval_exact_array(p, ns)
    A, B, X0, Y0 = a.x_raw, a.y_raw, g0.x_raw, g0.y_raw
    AB = A * B
    gamma, z0 = Fraction(a.z), Fraction(g0.z)
    size = len(ms)
    xr = np.empty(size, dtype=np.uint64)
    yr = np.empty(size, dtype=np.uint64)
    zz = np.empty(size, dtype=np.float64)
    for i, m in enumerate(ms.tolist()):
        if m < 0:
            raise ValueError(f"negative orbit index {m}")
        mA = m * A
        ys = m * B + Y0
        x_red = (mA + X0) & MASK64
        # C(m,2) A B + (m A) Y0 - x_red * floor(ys / 2^64) * 2^64, over 2^128
        num = ((m * (m - 1) >> 1) * AB + mA * Y0 - ((x_red * (ys >> 64)) << 64)) & MASK128
        if gamma:
            zf = gamma * m + z0
            zz[i] = _add_mod1(num / (1 << 128), float(zf - math.floor(zf)))
        else:
            zz[i] = _add_mod1(num / (1 << 128), g0.z)
        xr[i] = x_red
        yr[i] = ys & MASK64
    return xr, yr, zz


def _bump(t):
    s = np.sin(np.pi * t)
    return s * s


def observable(kind: str, g: HeisenbergPoint, k: int = 1) -> complex:
    """Continuous functions on the nilmanifold.

    ``char_x`` / ``char_y``: e(k x), e(k y) (factor through the torus quotient).
    ``smooth_z``: e(z) sin^2(pi x) sin^2(pi y); the bump kills the seams of the
    fundamental domain, so the function is continuous on the quotient.
    """
    if kind == "char_x":
        return character(k, g.x)
    if kind == "char_y":
        return character(k, g.y)
    if kind == "smooth_z":
        ang = TWO_PI * g.z
        w = float(_bump(g.x_raw / ONE) * _bump(g.y_raw / ONE))
        return complex(math.cos(ang) * w, math.sin(ang) * w)
    raise ValueError(f"unknown observable {kind!r}")


def observable_array(kind: str, xr: np.ndarray, yr: np.ndarray, z: np.ndarray, k: int = 1) -> np.ndarray:
    if kind == "char_x":
        return character_array(k, xr)
    if kind == "char_y":
        return character_array(k, yr)
    if kind == "smooth_z":
        w = _bump(_phase(xr)) * _bump(_phase(yr))
        ang = TWO_PI * z
        return (np.cos(ang) + 1j * np.sin(ang)) * w
    raise ValueError(f"unknown observable {kind!r}")
