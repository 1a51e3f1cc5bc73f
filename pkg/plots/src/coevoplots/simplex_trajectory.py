"""Barycentric strategy trajectories on the 2-simplex (3-action games only).

Input: seed CSVs (repeatable); each run's strategy_p1 path is drawn inside
the triangle, start marked with a circle, end with a cross. Rejects any
input whose strategies are not 3-dimensional.
"""

import sys

import matplotlib.pyplot as plt
import numpy as np

from . import _cli
from .io import InputError, export_series, read_csv_columns, require_columns

# Triangle corners for actions 0, 1, 2.
CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])


def to_xy(strategies: np.ndarray) -> np.ndarray:
    return strategies @ CORNERS


def build_parser():
    p = _cli.base_parser(__doc__, multi_input=True)
    p.add_argument("--player", choices=("p1", "p2"), default="p1")
    return p


def trajectories(paths, player):
    col = f"strategy_{player}"
    out = []
    for path in paths:
        cols = read_csv_columns(path)
        require_columns(cols, [col], path)
        rows = [s for s in cols[col] if s is not None]
        if not rows:
            raise InputError(f"no strategy data in {path}")
        traj = np.stack(rows)
        if traj.shape[1] != 3:
            raise InputError(
                f"simplex plot needs 3-action strategies, got d={traj.shape[1]} in {path}")
        out.append(traj)
    return out


def plot(argv=None) -> None:
    args = build_parser().parse_args(argv)
    trajs = trajectories(args.input, args.player)

    fig, ax = plt.subplots(figsize=_cli.parse_figsize(args.figsize, (5, 4.6)))
    tri = np.vstack([CORNERS, CORNERS[:1]])
    ax.plot(tri[:, 0], tri[:, 1], color="black", linewidth=1)
    for i, label in enumerate(("a0", "a1", "a2")):
        ax.annotate(label, CORNERS[i], textcoords="offset points", xytext=(0, 4),
                    ha="center")
    series: dict[str, list] = {}
    for i, traj in enumerate(trajs):
        xy = to_xy(traj)
        ax.plot(xy[:, 0], xy[:, 1], alpha=0.7, linewidth=1)
        ax.plot(*xy[0], marker="o", color="black", markersize=3)
        ax.plot(*xy[-1], marker="x", color="red", markersize=5)
        series[f"run{i}:x"] = list(xy[:, 0])
        series[f"run{i}:y"] = list(xy[:, 1])
    ax.set_aspect("equal")
    ax.set_axis_off()
    if args.title:
        ax.set_title(args.title)
    fig.tight_layout()
    fig.savefig(args.output, dpi=args.dpi)
    plt.close(fig)
    export_series(args.output, series)


def main(argv=None) -> int:
    return _cli.run(plot, argv)


if __name__ == "__main__":
    sys.exit(main())
