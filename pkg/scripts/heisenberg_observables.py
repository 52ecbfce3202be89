"""Möbius-weighted vs unweighted averages of Heisenberg observables along n -> a^{p(n)} g0.

Every observable here has space average 0, so both columns should shrink with N.
"""

from mobius_orbits.averages import geometric_checkpoints, weighted_average
from mobius_orbits.moebius import build_moebius_table
from mobius_orbits.polyeval import IntPolynomial
from mobius_orbits.systems import build_orbit, parse_system

N = 10**6
table = build_moebius_table(N)
cps = geometric_checkpoints(1e3, N, 10)
system = parse_system("heis:a=sqrt2,sqrt3,0;g0=0.1,0.2,0.3")
for poly in ("0,1", "0,0,1", "1,1,1"):
    p = IntPolynomial.parse(poly)
    for obs in ("char_x:1", "char_y:2", "smooth_z"):
        orbit = build_orbit(system, obs, p)
        w = weighted_average(table, orbit, cps)
        u = weighted_average(None, orbit, cps)
        row = "  ".join(f"{abs(a):.2e}/{abs(b):.2e}" for a, b in zip(w.partials, u.partials))
        print(f"p={poly:6s} f={obs:9s} |mobius|/|unit| at N=1e3..1e6: {row}")
