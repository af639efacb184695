#!/usr/bin/env python3
"""Variable and clause counts of the direct and plus encodings, with and without ALOD / symmetry.

    python scripts/encoding_sizes.py                 # counts only, D5,10,5 and D6,11,6
    python scripts/encoding_sizes.py --solve 5,10,5  # also time the embedded solver
"""
import argparse
import csv
import sys

from packing_sat.encoder import EncodingOptions, default_layer_colors, encode
from packing_sat.engine import solve


def parse_instance(text):
    r, k, c = (int(x) for x in text.split(","))
    return r, k, c


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", nargs="+", default=[(5, 10, 5), (6, 11, 6)], type=parse_instance)
    ap.add_argument("--solve", nargs="*", default=[], type=parse_instance,
                    help="instances to solve (embedded solver, no budget)")
    ap.add_argument("--budget", type=int)
    args = ap.parse_args()

    w = csv.writer(sys.stdout)
    w.writerow(["r", "k", "c", "variant", "alod", "sym", "vars", "clauses", "status", "seconds", "conflicts"])
    for r, k, c in args.instances + [i for i in args.solve if i not in args.instances]:
        for variant in ("direct", "plus"):
            for alod in (False, True):
                for sym in (False, True):
                    layers = default_layer_colors(r, k) if sym else ()
                    f, _ = encode(r, k, c, EncodingOptions(variant, alod=alod, symmetry_layers=layers))
                    row = [r, k, c, variant, int(alod), int(sym), f.num_vars, f.num_clauses, "", "", ""]
                    if (r, k, c) in args.solve:
                        res = solve(f, budget=args.budget)
                        row[8:] = [res.status, f"{res.stats['wall']:.2f}", res.stats["conflicts"]]
                    w.writerow(row)
                    sys.stdout.flush()


if __name__ == "__main__":
    main()
