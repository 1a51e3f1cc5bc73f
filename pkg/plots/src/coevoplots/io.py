"""CSV schema readers and the exported-series sidecar format.

Seed CSVs: one row per logged generation, empty cells for fields a run
does not produce, strategy columns as semicolon-joined floats.
Aggregate CSVs: per-column mean/p5/p25/p75/p95 bands over seeds.
"""

import csv
import io as _io
from pathlib import Path

import numpy as np


class InputError(Exception):
    """Bad or missing input data; scripts report it and exit nonzero."""


def read_csv_columns(path: str | Path) -> dict[str, list]:
    """Any harness CSV as {column: list}; floats, None for empty cells,
    numpy arrays for strategy columns, ints for the two index columns."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"input file not found: {path}")
    reader = csv.reader(_io.StringIO(path.read_text()))
    try:
        header = next(reader)
    except StopIteration:
        raise InputError(f"empty CSV: {path}") from None
    cols: dict[str, list] = {h: [] for h in header}
    for row in reader:
        for h, cell in zip(header, row):
            if cell == "":
                cols[h].append(None)
            elif h.startswith("strategy"):
                cols[h].append(np.array([float(x) for x in cell.split(";")]))
            elif h in ("generation", "evals_used"):
                cols[h].append(int(cell))
            else:
                cols[h].append(float(cell))
    return cols


def require_columns(cols: dict, needed, path) -> None:
    for name in needed:
        if name not in cols:
            raise InputError(f"missing column {name!r} in {path}")


def series_path(output: str | Path) -> Path:
    out = Path(output)
    return out.with_suffix(out.suffix + ".series.txt")


def export_series(output: str | Path, series: dict[str, list]) -> Path:
    """Writes the drawn numbers next to the PNG, tab-separated.

    Floats are written with repr() so a reader gets back bit-identical
    values; None becomes an empty field. Shorter columns (overlaying runs
    of different lengths) are padded with empty fields.
    """
    n_rows = max((len(v) for v in series.values()), default=0)
    path = series_path(output)
    names = list(series)
    lines = ["\t".join(names)]
    for i in range(n_rows):
        cells = []
        for n in names:
            v = series[n][i] if i < len(series[n]) else None
            cells.append("" if v is None else repr(float(v)))
        lines.append("\t".join(cells))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_series(path: str | Path) -> dict[str, list]:
    lines = Path(path).read_text().splitlines()
    names = lines[0].split("\t")
    out: dict[str, list] = {n: [] for n in names}
    for line in lines[1:]:
        for n, cell in zip(names, line.split("\t")):
            out[n].append(None if cell == "" else float(cell))
    return out
