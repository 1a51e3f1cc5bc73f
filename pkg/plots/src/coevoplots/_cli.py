"""Shared argparse scaffolding and error-to-exit-code handling."""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")  # batch scripts, never a display

from .io import InputError


def base_parser(description: str, multi_input: bool = False) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    if multi_input:
        p.add_argument("--input", action="append", required=True,
                       help="input CSV (repeatable)")
    else:
        p.add_argument("--input", required=True, help="input CSV")
    p.add_argument("--output", required=True, help="output PNG path")
    p.add_argument("--title", default=None)
    p.add_argument("--dpi", type=int, default=120)
    p.add_argument("--figsize", default=None,
                   help="width,height in inches (e.g. 8,5)")
    return p


def parse_figsize(arg, default):
    if arg is None:
        return default
    w, h = (float(x) for x in arg.split(","))
    return (w, h)


def run(fn, argv=None) -> int:
    try:
        fn(argv)
        return 0
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
