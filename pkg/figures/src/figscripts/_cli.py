"""Shared argument plumbing for the per-kind figure scripts."""
from __future__ import annotations

import argparse
import sys

from .core import FigureSpec, SchemaError, render


def run_kind(kind: str, description: str, argv=None, with_log_y: bool = False) -> int:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--in", dest="inputs", metavar="CSV", action="append",
                        required=True, help="input CSV (repeat for several series)")
    parser.add_argument("--out", required=True, metavar="IMAGE",
                        help="output image path (.png or .svg)")
    parser.add_argument("--title", default="")
    parser.add_argument("--xlabel")
    parser.add_argument("--ylabel")
    if with_log_y:
        parser.add_argument("--log-y", action="store_true",
                            help="logarithmic y axis")
    args = parser.parse_args(argv)
    spec = FigureSpec(kind=kind, inputs=tuple(args.inputs), out=args.out,
                      title=args.title, xlabel=args.xlabel, ylabel=args.ylabel,
                      log_y=bool(getattr(args, "log_y", False)))
    try:
        render(spec)
    except SchemaError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    return 0
