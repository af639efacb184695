#!/usr/bin/env python3
"""Split an instance with PTR cubes, solve every cube and report the runtime distribution.

    python scripts/cube_runtimes.py -r 5 -k 10 -c 5 --split 2,3,3 --report /tmp/cubes
"""
import argparse
import json
import time

from packing_sat.encoder import EncodingOptions, default_layer_colors, encode, place_regions
from packing_sat.engine import solve_cubes
from packing_sat.splitter import SplitParams, ptr_cubes, ptr_layout


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-r", type=int, default=5)
    ap.add_argument("-k", type=int, default=10)
    ap.add_argument("-c", type=int, default=5)
    ap.add_argument("--split", default="2,3,3")
    ap.add_argument("--alod", action="store_true")
    ap.add_argument("--sym", action="store_true")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--budget", type=int)
    ap.add_argument("--journal")
    ap.add_argument("--report", help="prefix for .csv and .json output")
    args = ap.parse_args()

    layers = default_layer_colors(args.r, args.k) if args.sym else ()
    f, vmap = encode(args.r, args.k, args.c, EncodingOptions("plus", alod=args.alod, symmetry_layers=layers))
    params = SplitParams(*(int(x) for x in args.split.split(",")), args.k, args.c)
    layout = ptr_layout(params, place_regions(args.r), vmap)
    cubes = [c.lits for c in ptr_cubes(params, layout=layout)]
    t0 = time.perf_counter()
    rep = solve_cubes(f, cubes, workers=args.workers, budget=args.budget, journal=args.journal)
    summary = rep.summary()
    summary.update(wall=time.perf_counter() - t0, total_runtime=rep.total_runtime, top_colors=layout.colors)
    print(json.dumps(summary, indent=2))
    if args.report:
        with open(args.report + ".csv", "w") as fh:
            fh.write(rep.to_csv())
        with open(args.report + ".json", "w") as fh:
            json.dump(summary, fh, indent=2)


if __name__ == "__main__":
    main()
