"""Tabulate ``H(x, y)`` on a grid and write it as CSV for ``maxmart detect``.

    python scripts/make_grid.py exp_decay --param rate=1 --c 0 --out grid.csv
    python scripts/make_grid.py --expr "x**2" --out square.csv
"""

import argparse

import numpy as np

from maxmart.characterize import GridFunction, GridSpec
from maxmart.core import MaxMartingaleSpec
from maxmart.functions import RealFunction


def parse_params(items):
    out = {}
    for item in items:
        key, _, value = item.partition("=")
        out[key] = float(value)
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description="write an H grid as CSV")
    ap.add_argument("kind", nargs="?", help="function kind, e.g. exp_decay")
    ap.add_argument("--param", action="append", default=[], help="key=value, repeatable")
    ap.add_argument("--c", type=float, default=0.0)
    ap.add_argument("--expr", help="numpy expression in x and y instead of a kind")
    ap.add_argument("--y-max", type=float, default=2.0)
    ap.add_argument("--n-y", type=int, default=40)
    ap.add_argument("--out", default="grid.csv")
    args = ap.parse_args()
    xs, ys = GridSpec(y_max=args.y_max, n_y=args.n_y).grids()
    if args.expr:
        grid = GridFunction.from_callable(lambda x, y: eval(args.expr, {"np": np, "x": x, "y": y}), xs, ys)
    elif args.kind:
        f = RealFunction(args.kind, parse_params(args.param))
        grid = GridFunction.from_spec(MaxMartingaleSpec("max", f, args.c), xs, ys)
    else:
        ap.error("give a function kind or --expr")
    grid.to_csv(args.out)
    print(f"wrote {args.out}: {ys.size} rows x {xs.size} columns")
