"""Run every subcommand at desk scale and drop the CSVs into a results directory.

    python scripts/run_experiments.py [--out results] [--threads K]
"""

import argparse
import sys
import time
from pathlib import Path

from mobius_orbits import cli

EXPERIMENTS = {
    "sieve": ["sieve", "--limit", "10^7"],
    "average_rotation_n2": ["average", "--system", "rotation:alpha=golden", "--observable", "char:1", "--poly", "0,0,1",
                            "--checkpoints", "geom:1e3:1e7:10^0.5"],
    "average_heis_n2": ["average", "--system", "heis:a=sqrt2,sqrt3,0", "--observable", "smooth_z", "--poly", "0,0,1",
                        "--checkpoints", "geom:1e3:1e6:10^0.5"],
    "average_counterexample": ["average", "--system", "subshift:counterexample", "--observable", "x0", "--poly", "0,0,1",
                               "--checkpoints", "geom:1e3:1e6:10^0.5"],
    "davenport_n": ["davenport", "--poly", "0,1", "--checkpoints", "1000,10000,100000,1000000"],
    "davenport_n2": ["davenport", "--poly", "0,0,1", "--checkpoints", "1000,10000,100000,1000000"],
    "kbsz_rotation": ["kbsz", "--system", "rotation:alpha=golden", "--observable", "char:1", "--poly", "0,0,1", "--N", "10^5"],
    "kbsz_heis": ["kbsz", "--system", "heis", "--observable", "char_y:1", "--poly", "0,1", "--N", "10^5"],
    "counterexample": ["counterexample", "--M", "10^6"],
    "entropy": ["entropy", "--M", "10^7", "--lengths", "16,32,64,128,256,512,1024"],
    "equidist": ["equidist", "--poly", "0,0,1", "--checkpoints", "1000,10000,100000"],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--threads", default=None)
    ap.add_argument("--sieve-cache", default=None)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failed = 0
    for name, argv in EXPERIMENTS.items():
        argv = argv + ["--out", str(out / f"{name}.csv")]
        if args.threads:
            argv += ["--threads", args.threads]
        if args.sieve_cache and name != "kbsz_rotation":
            argv += ["--sieve-cache", args.sieve_cache]
        t0 = time.perf_counter()
        code = cli.main(argv)
        print(f"{name:26s} exit={code} {time.perf_counter() - t0:7.2f}s")
        failed += code != 0
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
