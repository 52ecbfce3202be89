"""Parsing of system / observable spec strings into vectorized orbit evaluators.

System grammar (case-sensitive)::

    rotation[:alpha=ANGLE[;x0=ANGLE]]
    heis[:a=ANGLE,ANGLE,REAL[;g0=ANGLE,ANGLE,REAL]]
    subshift:counterexample

ANGLE is ``golden``, ``sqrtK`` (fractional part of sqrt K) or a decimal in
[0, 1). Defaults: rotation alpha=golden, x0=0; heis a=sqrt2,sqrt3,0, g0=0,0,0.
A decimal rotation angle is rounded to the grid and its lowest bit is set so
the angle has full order (a shift of at most 2^-64).

Observables: rotation ``char:K``; heis ``char_x:K``, ``char_y:K``,
``smooth_z``; subshift ``x0``; any system ``const``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .moebius import MoebiusTable
from .polyeval import IntPolynomial, eval_exact, eval_exact_array
from .symbolic import SquareSupportSequence, shift_orbit_values
from .torus import (
    Frac64,
    HeisenbergPoint,
    RotationSystem,
    character_array,
    heis_orbit_arrays,
    named_angle,
    rotation_angle,
    observable_array,
    rotation_orbit_raw,
)


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class SystemSpec:
    kind: str
    params: dict

    @property
    def text(self) -> str:
        if not self.params:
            return self.kind
        return self.kind + ":" + ";".join(f"{k}={v}" for k, v in self.params.items())


_SYSTEM_KEYS = {"rotation": {"alpha", "x0"}, "heis": {"a", "g0"}, "subshift": set()}


def parse_system(text: str) -> SystemSpec:
    kind, _, rest = text.partition(":")
    if kind not in _SYSTEM_KEYS:
        raise SpecError(f"unknown system {kind!r} (expected rotation, heis or subshift)")
    if kind == "subshift":
        if rest != "counterexample":
            raise SpecError("only 'subshift:counterexample' is available")
        return SystemSpec(kind, {})
    params = {}
    for item in filter(None, rest.split(";")):
        key, eq, val = item.partition("=")
        if not eq or key not in _SYSTEM_KEYS[kind]:
            raise SpecError(f"bad {kind} parameter {item!r}")
        params[key] = val
    # validate eagerly so errors surface before any computation
    if kind == "rotation":
        _rotation_angle(params.get("alpha", "golden"))
        named_angle(params.get("x0", "0"))
    else:
        _heis_point(params.get("a", "sqrt2,sqrt3,0"))
        _heis_point(params.get("g0", "0,0,0"))
    return SystemSpec(kind, params)


def _rotation_angle(text: str) -> Frac64:
    try:
        return rotation_angle(text)
    except ValueError as e:
        raise SpecError(str(e)) from None


def _heis_point(text: str) -> HeisenbergPoint:
    parts = text.split(",")
    if len(parts) != 3:
        raise SpecError(f"Heisenberg point needs three coordinates, got {text!r}")
    try:
        x, y = named_angle(parts[0]), named_angle(parts[1])
        z = float(parts[2])
    except ValueError as e:
        raise SpecError(str(e)) from None
    if not 0.0 <= z < 1.0:
        raise SpecError(f"z coordinate {z} not in [0, 1)")
    return HeisenbergPoint(x.raw, y.raw, z)


_OBSERVABLES = {
    "rotation": {"char", "const"},
    "heis": {"char_x", "char_y", "smooth_z", "const"},
    "subshift": {"x0", "const"},
}


def parse_observable(text: str, system: SystemSpec) -> tuple[str, int]:
    name, _, arg = text.partition(":")
    if name not in _OBSERVABLES[system.kind]:
        raise SpecError(f"observable {name!r} not defined on {system.kind} (choose from {sorted(_OBSERVABLES[system.kind])})")
    k = 1
    if name in ("char", "char_x", "char_y"):
        try:
            k = int(arg) if arg else 1
        except ValueError:
            raise SpecError(f"bad frequency in {text!r}") from None
        if k == 0 or abs(k) > 2**31:
            raise SpecError("frequency must be nonzero with |k| <= 2^31")
    elif arg:
        raise SpecError(f"observable {name!r} takes no argument")
    return name, k


def _max_index(p: IntPolynomial, n_max: int) -> int:
    if p.degree == 0:
        return p.coeffs[0]
    vals = eval_exact_array(p, np.arange(1, n_max + 1, dtype=np.int64))
    return int(max(vals)) if vals.dtype == object else int(vals.max())


@dataclass
class Orbit:
    """n -> f(T^{p(n)} x) for a fixed system, point, observable and polynomial."""

    values: Callable[[np.ndarray], np.ndarray]
    descriptor: str
    available: int | None = None

    def __call__(self, ns: np.ndarray) -> np.ndarray:
        return self.values(ns)


def required_sieve_limit(system: SystemSpec, p: IntPolynomial, n_max: int) -> int:
    """Sieve limit needed to evaluate the orbit for indices up to n_max."""
    if system.kind == "subshift":
        return max(1, math.isqrt(max(_max_index(p, n_max), 0)))
    return 1


def build_orbit(
    system: SystemSpec,
    observable: str,
    p: IntPolynomial,
    table: MoebiusTable | None = None,
    n_max: int | None = None,
) -> Orbit:
    name, k = parse_observable(observable, system)
    desc = f"{system.text} f={observable} p={p.spec()}"
    if name == "const":
        return Orbit(lambda ns: np.ones(len(ns), dtype=np.complex128), desc)
    if system.kind == "rotation":
        rot = RotationSystem(_rotation_angle(system.params.get("alpha", "golden")), system.text)
        x0 = named_angle(system.params.get("x0", "0"))
        return Orbit(lambda ns: character_array(k, rotation_orbit_raw(rot, x0, p, ns)), desc)
    if system.kind == "heis":
        a = _heis_point(system.params.get("a", "sqrt2,sqrt3,0"))
        g0 = _heis_point(system.params.get("g0", "0,0,0"))

        def heis_values(ns):
            xr, yr, z = heis_orbit_arrays(a, g0, p, ns)
            return observable_array(name, xr, yr, z, k)

        return Orbit(heis_values, desc)
    # subshift:counterexample, observable x0 (coordinate at 0 of the shifted point)
    if table is None or n_max is None:
        raise SpecError("the subshift orbit needs a Möbius table and the largest index")
    seq = SquareSupportSequence(table, _max_index(p, n_max) + 1)

    def shift_values(ns):
        return shift_orbit_values(seq, p, ns).astype(np.complex128)

    return Orbit(shift_values, desc, available=n_max)
