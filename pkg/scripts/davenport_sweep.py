"""Circle-sup decay for a handful of polynomials; prints sup(N) and the fitted A.

    python scripts/davenport_sweep.py [--nmax 1e6] [--grid 2^14] [--refine 20]
"""

import argparse

from mobius_orbits.averages import davenport_series, decay_fit
from mobius_orbits.cli import parse_int
from mobius_orbits.moebius import build_moebius_table
from mobius_orbits.polyeval import IntPolynomial

POLYS = ["0,1", "0,0,1", "0,1,1", "0,0,0,1", "1,0,2,1", "0,0,0,0,1"]

ap = argparse.ArgumentParser()
ap.add_argument("--nmax", default="10^6")
ap.add_argument("--grid", default="2^14")
ap.add_argument("--refine", type=int, default=20)
args = ap.parse_args()

nmax = parse_int(args.nmax)
cps = [n for n in (10**3, 10**4, 10**5, 10**6, 10**7) if n <= nmax]
table = build_moebius_table(nmax)
print("poly".ljust(12) + "".join(f"N={n:<10d}" for n in cps) + "A")
for spec in POLYS:
    p = IntPolynomial.parse(spec)
    s = davenport_series(table, p, cps, parse_int(args.grid), args.refine)
    fit = decay_fit(s) if len(cps) >= 4 else None
    print(spec.ljust(12) + "".join(f"{v:<12.4g}" for v in s.partials) + (f"{fit.A:.3f}" if fit else "-"))
