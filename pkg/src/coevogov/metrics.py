"""Equilibrium-distance metrics, per-seed record streams, and CSV schema."""
from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

KL_FLOOR = 1e-12

CSV_COLUMNS = (
    "generation", "evals_used", "kl_p1", "kl_p2", "l_p1", "l_p2", "alpha_mean",
    "sigma_p1", "sigma_p2", "d_proxy", "fim", "gamma",
    "coop_rich", "coop_poor", "coop_collapsed", "strategy_p1", "strategy_p2",
)


def kl_divergence(p: np.ndarray, q: np.ndarray, floor: float = KL_FLOOR) -> float:
    """KL(p || q) in nats with flooring + renormalization, so KL(p || p) = 0."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    if p.shape != q.shape:
        raise ValueError("distributions must have equal dimension")
    p = np.maximum(p, floor)
    q = np.maximum(q, floor)
    p = p / p.sum()
    q = q / q.sum()
    return float(np.sum(p * np.log(p / q)))


def mean_strategy(items) -> np.ndarray:
    """Componentwise mean of simplex vectors (closed on the simplex)."""
    arr = np.asarray(list(items), float)
    if arr.size == 0:
        raise ValueError("empty strategy list")
    return arr.mean(axis=0)


@dataclass
class GenerationRecord:
    """One logged row; None fields serialize as empty CSV cells."""
    generation: int
    evals_used: int
    kl_p1: float | None = None
    kl_p2: float | None = None
    l_p1: float | None = None
    l_p2: float | None = None
    alpha_mean: float | None = None
    sigma_p1: float | None = None
    sigma_p2: float | None = None
    d_proxy: float | None = None
    fim: float | None = None
    gamma: float | None = None
    coop_rich: float | None = None
    coop_poor: float | None = None
    coop_collapsed: float | None = None
    strategy_p1: np.ndarray | None = None
    strategy_p2: np.ndarray | None = None

    def to_row(self) -> list[str]:
        def cell(v):
            if v is None or (isinstance(v, float) and np.isnan(v)):
                return ""
            if isinstance(v, np.ndarray):
                return ";".join(repr(float(x)) for x in v)
            if isinstance(v, float):
                return repr(v)
            return str(v)
        return [cell(getattr(self, c)) for c in CSV_COLUMNS]


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.to_row())
    return buf.getvalue()


def parse_csv(text: str) -> dict[str, list]:
    """Columns as lists; scalar cells become float or None, strategies arrays."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    cols = {h: [] for h in header}
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


BAND_STATS = ("mean", "p5", "p25", "p75", "p95")


def aggregate(streams: list[dict[str, list]]) -> dict[str, list]:
    """Per-generation mean and percentile bands across aligned seed streams.

    Percentiles use linear interpolation (the inclusive method). Streams
    must share the generation grid; vector-valued and all-empty columns are
    skipped.
    """
    if not streams:
        raise ValueError("need at least one stream")
    grids = [s["generation"] for s in streams]
    if any(g != grids[0] for g in grids[1:]):
        raise ValueError("misaligned generation grids")
    out: dict[str, list] = {"generation": list(grids[0]),
                            "evals_used": list(streams[0]["evals_used"])}
    n_rows = len(grids[0])
    for col in streams[0]:
        if col in ("generation", "evals_used") or col.startswith("strategy"):
            continue
        if all(v is None for s in streams for v in s[col]):
            continue
        values = np.array([[np.nan if v is None else v for v in s[col]] for s in streams])
        with warnings.catch_warnings():
            # rows where every seed logged an empty cell yield NaN stats
            warnings.simplefilter("ignore", RuntimeWarning)
            out[f"{col}_mean"] = list(np.nanmean(values, axis=0)) if n_rows else []
            for stat, pct in (("p5", 5), ("p25", 25), ("p75", 75), ("p95", 95)):
                out[f"{col}_{stat}"] = list(np.nanpercentile(values, pct, axis=0)) if n_rows else []
    return out


def aggregate_to_csv(agg: dict[str, list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = list(agg)
    w.writerow(cols)
    for i in range(len(agg["generation"])):
        w.writerow([repr(float(agg[c][i])) if isinstance(agg[c][i], float) else agg[c][i] for c in cols])
    return buf.getvalue()


def kl_reduction(kl_stream: list[float]) -> float:
    """Final minus initial KL along one stream; negative means improvement."""
    vals = [v for v in kl_stream if v is not None]
    if not vals:
        raise ValueError("empty KL stream")
    return vals[-1] - vals[0]
