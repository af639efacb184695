#!/usr/bin/env python3
"""Extended target: D_{6,11,6} with plus + ALOD + symmetry, embedded or through an external solver.

    python scripts/extended_radius6.py --external "python3 scripts/pysat_solver.py {path}"
"""
import argparse
import time

from packing_sat.encoder import EncodingOptions, default_layer_colors, encode
from packing_sat.engine import run_external, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--external", help="solver command template with {path}")
    ap.add_argument("--timeout", type=float)
    ap.add_argument("--budget", type=int)
    args = ap.parse_args()
    f, _ = encode(6, 11, 6, EncodingOptions("plus", alod=True, symmetry_layers=default_layer_colors(6, 11)))
    t0 = time.perf_counter()
    if args.external:
        res = run_external(f, args.external, timeout=args.timeout)
    else:
        res = solve(f, budget=args.budget)
    print(f"status={res.status} seconds={time.perf_counter() - t0:.1f} vars={f.num_vars} clauses={f.num_clauses}")


if __name__ == "__main__":
    main()
