"""Möbius-weighted averages along polynomial orbits of rotations, a Heisenberg
nilsystem and a square-supported subshift."""

from .averages import (
    AverageSeries,
    DecayReport,
    davenport_series,
    davenport_sup,
    decay_fit,
    exp_sum,
    kbsz_correlation,
    star_discrepancy,
    weighted_average,
)
from .moebius import MoebiusTable, build_moebius_table, mertens, mobius_oracle, squarefree_density
from .polyeval import IntPolynomial, eval_exact, eval_wrapped, nonneg_on_range, stream_evaluator
from .symbolic import counterexample_sequence, distinct_factors, entropy_growth_report, first_zero_run
from .torus import Frac64, HeisenbergPoint, RotationSystem, frac_from_real, heis_mul, heis_pow

__all__ = [
    "AverageSeries", "DecayReport", "Frac64", "HeisenbergPoint", "IntPolynomial", "MoebiusTable",
    "RotationSystem", "build_moebius_table", "counterexample_sequence", "davenport_series",
    "davenport_sup", "decay_fit", "distinct_factors", "entropy_growth_report", "eval_exact",
    "eval_wrapped", "exp_sum", "first_zero_run", "frac_from_real", "heis_mul", "heis_pow",
    "kbsz_correlation", "mertens", "mobius_oracle", "nonneg_on_range", "squarefree_density",
    "star_discrepancy", "stream_evaluator", "weighted_average",
]
