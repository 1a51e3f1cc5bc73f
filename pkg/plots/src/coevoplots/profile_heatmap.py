"""Final-profile heatmap over a batch of runs.

Input: seed CSVs (repeatable). Takes each run's final strategy row and
bins the pair (p1[action], p2[action]) into a 2-D histogram, the
"final strategy distribution over N runs" view for coordination games.
"""

import sys

import matplotlib.pyplot as plt
import numpy as np

from . import _cli
from .io import InputError, export_series, read_csv_columns, require_columns


def build_parser():
    p = _cli.base_parser(__doc__, multi_input=True)
    p.add_argument("--action", type=int, default=0,
                   help="action index whose probability is binned (default 0)")
    p.add_argument("--bins", type=int, default=20)
    return p


def final_points(paths, action):
    pts = []
    for path in paths:
        cols = read_csv_columns(path)
        require_columns(cols, ["strategy_p1", "strategy_p2"], path)
        s1, s2 = cols["strategy_p1"][-1], cols["strategy_p2"][-1]
        if s1 is None or s2 is None:
            raise InputError(f"no strategy data in final row of {path}")
        if not (0 <= action < s1.size):
            raise InputError(f"action {action} out of range for d={s1.size} in {path}")
        pts.append((float(s1[action]), float(s2[action])))
    return np.array(pts)


def plot(argv=None) -> None:
    args = build_parser().parse_args(argv)
    pts = final_points(args.input, args.action)
    hist, xe, ye = np.histogram2d(pts[:, 0], pts[:, 1], bins=args.bins,
                                  range=[[0.0, 1.0], [0.0, 1.0]])

    fig, ax = plt.subplots(figsize=_cli.parse_figsize(args.figsize, (5, 4.2)))
    im = ax.imshow(hist.T, origin="lower", extent=(0, 1, 0, 1), aspect="equal",
                   cmap="viridis")
    fig.colorbar(im, ax=ax, label="runs")
    ax.set_xlabel(f"player 1 p(action {args.action})")
    ax.set_ylabel(f"player 2 p(action {args.action})")
    if args.title:
        ax.set_title(args.title)
    fig.tight_layout()
    fig.savefig(args.output, dpi=args.dpi)
    plt.close(fig)
    export_series(args.output, {"p1": list(pts[:, 0]), "p2": list(pts[:, 1])})


def main(argv=None) -> int:
    return _cli.run(plot, argv)


if __name__ == "__main__":
    sys.exit(main())
