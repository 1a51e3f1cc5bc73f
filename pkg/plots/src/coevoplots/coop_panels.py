"""State-conditioned cooperation panels for the resource game.

Input: one aggregate.csv with coop_* band columns. Three panels
(Rich / Poor / Collapsed), mean line plus interquartile band, x-axis as
percent of the evaluation budget actually spent.
"""

import sys

import matplotlib.pyplot as plt
import numpy as np

from . import _cli
from .io import InputError, export_series, read_csv_columns, require_columns

STATES = ("coop_rich", "coop_poor", "coop_collapsed")
PANEL_TITLES = ("Rich", "Poor", "Collapsed")


def build_parser():
    return _cli.base_parser(__doc__)


def plot(argv=None) -> None:
    args = build_parser().parse_args(argv)
    cols = read_csv_columns(args.input)
    needed = ["evals_used"]
    for s in STATES:
        needed += [f"{s}_mean", f"{s}_p25", f"{s}_p75"]
    require_columns(cols, needed, args.input)

    evals = np.asarray(cols["evals_used"], float)
    total = evals[-1] if evals.size and evals[-1] > 0 else 1.0
    pct = 100.0 * evals / total

    fig, axes = plt.subplots(1, 3, figsize=_cli.parse_figsize(args.figsize, (10, 3.4)),
                             sharey=True)
    series: dict[str, list] = {"budget_pct": list(pct)}
    for ax, state, title in zip(axes, STATES, PANEL_TITLES):
        mean = np.asarray(cols[f"{state}_mean"], float)
        p25 = np.asarray(cols[f"{state}_p25"], float)
        p75 = np.asarray(cols[f"{state}_p75"], float)
        ax.plot(pct, mean)
        ax.fill_between(pct, p25, p75, alpha=0.3, linewidth=0)
        ax.set_title(title)
        ax.set_xlabel("% of budget")
        ax.set_xlim(0.0, 100.0)
        ax.set_ylim(-0.02, 1.02)
        for stat in ("mean", "p25", "p75"):
            series[f"{state}_{stat}"] = cols[f"{state}_{stat}"]
    axes[0].set_ylabel("cooperation probability")
    if args.title:
        fig.suptitle(args.title)
    fig.tight_layout()
    fig.savefig(args.output, dpi=args.dpi)
    plt.close(fig)
    export_series(args.output, series)


def main(argv=None) -> int:
    return _cli.run(plot, argv)


if __name__ == "__main__":
    sys.exit(main())
