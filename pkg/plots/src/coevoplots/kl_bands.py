"""Log-scale KL convergence curves with percentile bands.

Input: aggregate.csv files (repeatable for algorithm overlays). The shaded
regions are the p25-p75 and p5-p95 bands across seeds; the line is the
mean. Numbers are exported verbatim from the input columns.
"""

import sys

import matplotlib.pyplot as plt
import numpy as np

from . import _cli
from .io import InputError, export_series, read_csv_columns, require_columns

BAND_STATS = ("mean", "p5", "p25", "p75", "p95")


def build_parser():
    p = _cli.base_parser(__doc__, multi_input=True)
    p.add_argument("--label", action="append", default=None,
                   help="legend label per input (repeatable)")
    p.add_argument("--column", default="kl_p1",
                   help="base column to band (default kl_p1)")
    p.add_argument("--x", choices=("generation", "evals_used"),
                   default="evals_used")
    return p


def plot(argv=None) -> None:
    args = build_parser().parse_args(argv)
    labels = args.label or [f"run{i}" for i in range(len(args.input))]
    if len(labels) != len(args.input):
        raise InputError("need one --label per --input")

    fig, ax = plt.subplots(figsize=_cli.parse_figsize(args.figsize, (7, 4.5)))
    series: dict[str, list] = {}
    for path, label in zip(args.input, labels):
        cols = read_csv_columns(path)
        needed = [args.x] + [f"{args.column}_{s}" for s in BAND_STATS]
        require_columns(cols, needed, path)
        x = np.asarray(cols[args.x], float)
        mean, p5, p25, p75, p95 = (np.asarray(cols[f"{args.column}_{s}"], float)
                                   for s in BAND_STATS)
        (line,) = ax.plot(x, mean, label=label)
        c = line.get_color()
        ax.fill_between(x, p25, p75, color=c, alpha=0.3, linewidth=0)
        ax.fill_between(x, p5, p95, color=c, alpha=0.12, linewidth=0)
        series[f"{label}:{args.x}"] = cols[args.x]
        for s in BAND_STATS:
            series[f"{label}:{args.column}_{s}"] = cols[f"{args.column}_{s}"]

    ax.set_yscale("log")
    ax.set_xlabel("payoff queries" if args.x == "evals_used" else "generation")
    ax.set_ylabel(f"KL divergence ({args.column})")
    if args.title:
        ax.set_title(args.title)
    if len(args.input) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=args.dpi)
    plt.close(fig)
    export_series(args.output, series)


def main(argv=None) -> int:
    return _cli.run(plot, argv)


if __name__ == "__main__":
    sys.exit(main())
