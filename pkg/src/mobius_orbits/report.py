"""Self-describing CSV artifacts: ``#`` header lines, then one data row per record.

Floats are written with 17 significant digits so every double round-trips.
"""

from __future__ import annotations

import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np


def fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def render_csv(header: Mapping[str, object], columns: Sequence[str], rows: Iterable[Sequence], trailer: Iterable[str] = ()) -> str:
    lines = [f"# {k}={fmt(v)}" for k, v in header.items()]
    lines.append("# columns: " + ",".join(columns))
    lines += [",".join(fmt(v) for v in row) for row in rows]
    lines += list(trailer)
    return "\n".join(lines) + "\n"


def series_rows(series) -> list[tuple]:
    return [(n, s.real, s.imag, abs(s)) for n, s in zip(series.checkpoints, np.asarray(series.partials, dtype=np.complex128))]


SERIES_COLUMNS = ("N", "re(S_N)", "im(S_N)", "abs(S_N)")


def read_csv(text: str) -> tuple[dict[str, str], list[list[str]], list[str]]:
    """Split a CSV artifact into (header dict, data rows, trailing comment lines)."""
    header: dict[str, str] = {}
    rows: list[list[str]] = []
    trailer: list[str] = []
    for line in text.splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if rows or body.startswith("fit:"):
                trailer.append(line)
            elif "=" in body and not body.startswith("columns:"):
                k, _, v = body.partition("=")
                header[k] = v
        elif line:
            rows.append(line.split(","))
    return header, rows, trailer


@contextmanager
def open_out(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(Path(path), "w") as fh:
            yield fh
