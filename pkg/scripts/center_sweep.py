#!/usr/bin/env python3
"""Solve D_{r,k,c} for every center color c and several k (runtime versus center color).

The full-size version of this sweep is far beyond a desk machine; small radii
show the same shape. Example: python scripts/center_sweep.py -r 5 -k 9 10
"""
import argparse
import csv
import sys

from packing_sat.encoder import EncodingOptions, encode
from packing_sat.engine import solve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-r", type=int, default=4)
    ap.add_argument("-k", type=int, nargs="+", default=[8, 9])
    ap.add_argument("--variant", choices=("direct", "plus"), default="plus")
    ap.add_argument("--alod", action="store_true")
    ap.add_argument("--budget", type=int, help="conflict limit per instance")
    args = ap.parse_args()
    w = csv.writer(sys.stdout)
    w.writerow(["r", "k", "c", "status", "seconds", "conflicts"])
    for k in args.k:
        for c in range(1, k + 1):
            f, _ = encode(args.r, k, c, EncodingOptions(args.variant, alod=args.alod))
            res = solve(f, budget=args.budget)
            w.writerow([args.r, k, c, res.status, f"{res.stats['wall']:.3f}", res.stats["conflicts"]])
            sys.stdout.flush()


if __name__ == "__main__":
    main()
