"""Command-line front end: every subcommand writes one self-describing CSV.

Exit codes: 0 success, 2 configuration error, 3 runtime error.

Options may also come from ``--config PATH``, a plain ``key=value`` file
(keys are option names without the leading dashes; ``#`` starts a comment).
Options given on the command line win over the file.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import averages, moebius, symbolic
from .polyeval import IntPolynomial, nonneg_on_range
from .report import SERIES_COLUMNS, open_out, render_csv, series_rows
from .systems import SpecError, build_orbit, parse_observable, parse_system, required_sieve_limit
from .torus import ONE

log = logging.getLogger("mobius_orbits")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

COMMANDS = ("sieve", "average", "davenport", "kbsz", "counterexample", "entropy", "equidist")

DEFAULT_OBSERVABLE = {"rotation": "char:1", "heis": "char_y:1", "subshift": "x0"}


class ConfigError(ValueError):
    pass


def parse_int(text: str) -> int:
    """Integers written as ``12345``, ``10^7``, ``2^16``, ``1e7`` or ``1_000``."""
    t = str(text).strip().replace("_", "")
    if "^" in t:
        base, _, exp = t.partition("^")
        return int(base) ** int(exp)
    try:
        return int(t)
    except ValueError:
        v = float(t)
        if not v.is_integer():
            raise ValueError(f"{text!r} is not an integer") from None
        return int(v)


def parse_real(text: str) -> float:
    t = str(text).strip()
    if "^" in t:
        base, _, exp = t.partition("^")
        return float(base) ** float(exp)
    return float(t)


def parse_int_list(text: str) -> list[int]:
    return [parse_int(s) for s in str(text).split(",") if s.strip()]


def parse_checkpoints(text: str) -> list[int]:
    """``N1,N2,...`` or ``geom:start:stop:factor``."""
    if text.startswith("geom:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError("geometric checkpoints are geom:start:stop:factor")
        return averages.geometric_checkpoints(parse_real(parts[1]), parse_real(parts[2]), parse_real(parts[3]))
    cps = parse_int_list(text)
    if not cps or cps[0] < 1 or any(b <= a for a, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be increasing positive integers")
    return cps


@dataclass
class ExperimentConfig:
    command: str
    limit: int | None = None
    poly: IntPolynomial = field(default_factory=lambda: IntPolynomial([0, 1]))
    system: str = "rotation:alpha=golden"
    observable: str | None = None
    weight: str = "mobius"
    checkpoints: list[int] | None = None
    N: int | None = None
    M: int | None = None
    lengths: list[int] | None = None
    primes: list[int] = field(default_factory=lambda: [2, 3, 5, 7, 11, 13])
    runlens: list[int] | None = None
    grid: int = averages.DEFAULT_GRID
    refine: int = averages.DEFAULT_REFINE
    out: str | None = None
    sieve_cache: str | None = None
    dump_seq: str | None = None
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)
    seed: int = 0

    def header(self) -> dict[str, object]:
        """The fields that determine this command's output (never ``threads`` or paths)."""
        h: dict[str, object] = {"command": self.command}
        for name in _HEADER_FIELDS[self.command]:
            v = getattr(self, name)
            if v is None:
                continue
            if isinstance(v, IntPolynomial):
                v = v.spec()
            elif isinstance(v, list):
                v = ",".join(str(x) for x in v)
            h[name] = v
        return h


_HEADER_FIELDS = {
    "sieve": ("limit", "checkpoints"),
    "average": ("system", "observable", "poly", "weight", "checkpoints"),
    "davenport": ("poly", "checkpoints", "grid", "refine"),
    "kbsz": ("system", "observable", "poly", "N", "primes"),
    "counterexample": ("M", "runlens"),
    "entropy": ("M", "lengths"),
    "equidist": ("system", "poly", "checkpoints"),
}


_PARSERS = {
    "limit": parse_int,
    "poly": IntPolynomial.parse,
    "system": str,
    "observable": str,
    "weight": str,
    "checkpoints": parse_checkpoints,
    "N": parse_int,
    "M": parse_int,
    "lengths": parse_int_list,
    "primes": parse_int_list,
    "runlens": parse_int_list,
    "grid": parse_int,
    "refine": parse_int,
    "out": str,
    "sieve_cache": str,
    "dump_seq": str,
    "threads": parse_int,
    "seed": parse_int,
}


def read_config_file(path: str) -> dict[str, tuple[str, str]]:
    """key -> (raw value, location) from a key=value file."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if not eq:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        if key not in _PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = (val.strip(), f"{path}:{lineno}")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("experiment options")
    g.add_argument("--limit", help="sieve limit, e.g. 10^7")
    g.add_argument("--poly", help="integer polynomial as coefficients low to high: 0,0,1 is n^2")
    g.add_argument("--system", help="rotation:alpha=golden | heis:a=sqrt2,sqrt3,0 | subshift:counterexample")
    g.add_argument("--observable", help="char:K | char_x:K | char_y:K | smooth_z | x0 | const")
    g.add_argument("--weight", help="mobius (default) or unit")
    g.add_argument("--checkpoints", help="N1,N2,... or geom:start:stop:factor")
    g.add_argument("--N", dest="N", help="number of terms")
    g.add_argument("--M", dest="M", help="length of the materialized symbol sequence")
    g.add_argument("--lengths", help="factor lengths for the entropy proxy")
    g.add_argument("--primes", help="primes for two-prime correlations")
    g.add_argument("--runlens", help="zero-run lengths for the counterexample report")
    g.add_argument("--grid", help="grid size of the circle sup scan (default 2^16)")
    g.add_argument("--refine", help="golden-section refinement rounds (default 30)")
    g.add_argument("--out", help="output CSV path (default stdout)")
    g.add_argument("--sieve-cache", dest="sieve_cache", help="binary Möbius table cache to load/save")
    g.add_argument("--dump-seq", dest="dump_seq", help="write the symbol sequence, one byte per symbol")
    g.add_argument("--threads", help="worker cap (default: logical cores)")
    g.add_argument("--seed", help="RNG seed (randomized checks only)")
    g.add_argument("--config", help="key=value config file; command-line options override it")

    parser = argparse.ArgumentParser(prog="mobius-orbits", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "sieve": "Möbius sieve: Mertens values and squarefree density",
        "average": "Möbius-weighted averages along a polynomial orbit",
        "davenport": "sup over the circle of Möbius-weighted polynomial exponential sums",
        "kbsz": "two-prime correlations of an orbit observable",
        "counterexample": "the square-supported Möbius sequence and its zero runs",
        "entropy": "distinct-factor counts of the counterexample sequence",
        "equidist": "star discrepancy of a polynomial rotation orbit",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def resolve_config(ns: argparse.Namespace) -> ExperimentConfig:
    raw: dict[str, tuple[str, str]] = {}
    if getattr(ns, "config", None):
        raw.update(read_config_file(ns.config))
    for key in _PARSERS:
        v = getattr(ns, key, None)
        if v is not None:
            raw[key] = (v, f"--{key.replace('_', '-')}")
    cfg = ExperimentConfig(command=ns.command)
    for key, (text, where) in raw.items():
        try:
            setattr(cfg, key, _PARSERS[key](text))
        except ValueError as e:
            raise ConfigError(f"{where}: field {key!r}: {e}") from None
    validate(cfg)
    return cfg


def _need(cfg, name):
    if getattr(cfg, name) is None:
        raise ConfigError(f"field {name!r} is required for '{cfg.command}'")


def validate(cfg: ExperimentConfig) -> None:
    """Fail fast on anything that would break mid-run."""
    c = cfg.command
    if cfg.threads < 1:
        raise ConfigError("field 'threads': must be >= 1")
    if cfg.weight not in ("mobius", "unit"):
        raise ConfigError("field 'weight': must be 'mobius' or 'unit'")
    if c == "sieve":
        _need(cfg, "limit")
        if not 1 <= cfg.limit <= moebius.MAX_LIMIT:
            raise ConfigError("field 'limit': must be in [1, 2^31]")
        if cfg.checkpoints is None:
            cfg.checkpoints = sorted({10**k for k in range(int(math.log10(cfg.limit)) + 1) if 10**k <= cfg.limit} | {cfg.limit})
        if cfg.checkpoints[-1] > cfg.limit:
            raise ConfigError("field 'checkpoints': exceeds the sieve limit")
    if c in ("average", "kbsz", "equidist"):
        try:
            spec = parse_system(cfg.system)
            if cfg.observable is None:
                cfg.observable = DEFAULT_OBSERVABLE[spec.kind]
            parse_observable(cfg.observable, spec)
        except SpecError as e:
            raise ConfigError(f"field 'system'/'observable': {e}") from None
        if c == "equidist" and spec.kind != "rotation":
            raise ConfigError("field 'system': equidist needs a rotation system")
        if c == "kbsz" and spec.kind == "subshift":
            raise ConfigError("field 'system': kbsz is defined for rotation and heis systems")
    if c in ("average", "davenport", "equidist"):
        if cfg.checkpoints is None:
            if cfg.N is not None:
                cfg.checkpoints = [cfg.N]
            elif c == "davenport":
                cfg.checkpoints = [10**3, 10**4, 10**5, 10**6]
            else:
                cfg.checkpoints = averages.geometric_checkpoints(1e3, 1e7, 10**0.5)
        cfg.N = cfg.checkpoints[-1]
    if c == "average":
        if not nonneg_on_range(cfg.poly, cfg.N):
            raise ConfigError(f"field 'poly': {cfg.poly} takes negative values on [1, {cfg.N}]")
    if c == "davenport":
        if cfg.grid < 2 or cfg.refine < 0:
            raise ConfigError("fields 'grid'/'refine': need grid >= 2 and refine >= 0")
        if cfg.N > moebius.MAX_LIMIT:
            raise ConfigError("field 'N': exceeds the sieve cap")
    if c == "kbsz":
        _need(cfg, "N")
        if len(cfg.primes) < 2 or len(set(cfg.primes)) != len(cfg.primes):
            raise ConfigError("field 'primes': need at least two distinct primes")
        if not all(averages._is_prime(q) for q in cfg.primes):
            raise ConfigError("field 'primes': all entries must be prime")
        if not nonneg_on_range(cfg.poly, cfg.N * max(cfg.primes)):
            raise ConfigError(f"field 'poly': {cfg.poly} takes negative values")
    if c in ("counterexample", "entropy"):
        _need(cfg, "M")
        if cfg.M < 2:
            raise ConfigError("field 'M': must be >= 2")
    if c == "counterexample" and cfg.runlens is None:
        cfg.runlens = [2**k for k in range(11) if 2**k <= cfg.M]
    if c == "entropy":
        if cfg.lengths is None:
            cfg.lengths = [L for L in (16, 32, 64, 128, 256, 512, 1024) if L <= cfg.M // 2]
        if len(cfg.lengths) < 3:
            raise ConfigError("field 'lengths': need at least three lengths")
        if max(cfg.lengths) > cfg.M // 2:
            raise ConfigError("field 'lengths': largest length must be <= M/2")


# --- commands -------------------------------------------------------------


def _table(cfg: ExperimentConfig, limit: int) -> moebius.MoebiusTable:
    return moebius.load_or_build(max(limit, 1), cfg.sieve_cache)


def cmd_sieve(cfg: ExperimentConfig) -> str:
    table = _table(cfg, cfg.limit)
    rows = []
    for n in cfg.checkpoints:
        vals = table.values[1 : n + 1]
        hist = np.bincount(vals.astype(np.int64) + 1, minlength=3)
        rows.append((n, moebius.mertens(table, n), moebius.squarefree_density(table, n), *hist.tolist()))
    cols = ("N", "M(N)", "squarefree_density", "count_mu_-1", "count_mu_0", "count_mu_+1")
    return render_csv(cfg.header(), cols, rows, [f"# reference: 6/pi^2={6 / math.pi**2:.17g}"])


def cmd_average(cfg: ExperimentConfig) -> tuple[str, averages.AverageSeries, averages.DecayReport | None]:
    spec = parse_system(cfg.system)
    limit = max(cfg.N if cfg.weight == "mobius" else 1, required_sieve_limit(spec, cfg.poly, cfg.N))
    table = _table(cfg, limit)
    orbit = build_orbit(spec, cfg.observable, cfg.poly, table, cfg.N)
    weight = table if cfg.weight == "mobius" else None
    series = averages.weighted_average(weight, orbit, cfg.checkpoints, cfg.threads, orbit.descriptor, orbit.available)
    fit = None
    trailer = []
    try:
        fit = averages.decay_fit(series)
        trailer.append(fit.line())
    except averages.DegenerateFitError as e:
        trailer.append(f"# fit: unavailable ({e})")
    return render_csv(cfg.header(), SERIES_COLUMNS, series_rows(series), trailer), series, fit


def cmd_davenport(cfg: ExperimentConfig) -> str:
    table = _table(cfg, cfg.N)
    sup = averages.davenport_series(table, cfg.poly, cfg.checkpoints, cfg.grid, cfg.refine, cfg.threads)
    rows = [(e.N, e.theta.raw, e.theta.raw / ONE, e.value, e.grid_value) for e in sup.estimates]
    trailer = []
    try:
        trailer.append(averages.decay_fit(sup).line())
    except averages.DegenerateFitError as e:
        trailer.append(f"# fit: unavailable ({e})")
    cols = ("N", "theta_raw", "theta", "sup_lower_bound", "grid_max")
    return render_csv(cfg.header(), cols, rows, trailer)


def cmd_kbsz(cfg: ExperimentConfig) -> str:
    spec = parse_system(cfg.system)
    orbit = build_orbit(spec, cfg.observable, cfg.poly)
    rows = []
    for q1, q2 in itertools.combinations(sorted(cfg.primes), 2):
        b = averages.kbsz_correlation(orbit, q1, q2, cfg.N, cfg.threads)
        rows.append((q1, q2, b.real, b.imag, abs(b)))
    return render_csv(cfg.header(), ("q1", "q2", "re(B_N)", "im(B_N)", "abs(B_N)"), rows)


def cmd_counterexample(cfg: ExperimentConfig) -> str:
    table = _table(cfg, math.isqrt(cfg.M - 1))
    seq = symbolic.counterexample_sequence(cfg.M, table)
    if cfg.dump_seq:
        symbolic.dump_sequence(seq, cfg.dump_seq)
    rows = []
    for r in cfg.runlens:
        pos = symbolic.first_zero_run(seq, r) if r <= cfg.M else None
        rows.append((r, "none" if pos is None else pos))
    header = cfg.header()
    header["nonzero_symbols"] = int(np.count_nonzero(seq.data))
    return render_csv(header, ("runlen", "first_zero_run"), rows)


def cmd_entropy(cfg: ExperimentConfig) -> str:
    table = _table(cfg, math.isqrt(cfg.M - 1))
    seq = symbolic.counterexample_sequence(cfg.M, table)
    rep = symbolic.entropy_growth_report(seq, cfg.lengths)
    rows = [(L, c, 10 * L * L) for L, c in zip(rep.lengths, rep.counts)]
    trailer = [f"# fit: slope={rep.slope:.17g}, intercept={rep.intercept:.17g}"]
    return render_csv(cfg.header(), ("L", "distinct_factors", "10*L^2"), rows, trailer)


def cmd_equidist(cfg: ExperimentConfig) -> str:
    from .systems import _rotation_angle
    from .torus import RotationSystem, named_angle, rotation_orbit_raw

    spec = parse_system(cfg.system)
    rot = RotationSystem(_rotation_angle(spec.params.get("alpha", "golden")))
    x0 = named_angle(spec.params.get("x0", "0"))
    raw = rotation_orbit_raw(rot, x0, cfg.poly, np.arange(1, cfg.N + 1, dtype=np.int64))
    rows = [(n, averages.star_discrepancy(raw[:n])) for n in cfg.checkpoints]
    return render_csv(cfg.header(), ("N", "star_discrepancy"), rows)


def run(cfg: ExperimentConfig) -> str:
    if cfg.command == "average":
        return cmd_average(cfg)[0]
    return {
        "sieve": cmd_sieve,
        "davenport": cmd_davenport,
        "kbsz": cmd_kbsz,
        "counterexample": cmd_counterexample,
        "entropy": cmd_entropy,
        "equidist": cmd_equidist,
    }[cfg.command](cfg)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(ns)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = run(cfg)
        with open_out(cfg.out) as fh:
            fh.write(text)
    except (ConfigError, SpecError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001 - any failure mid-run maps to the runtime exit code
        print(f"runtime error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
