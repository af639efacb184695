#!/usr/bin/env python3
"""Per-color clause counts against the radius for the direct and plus encodings.

Writes CSV to stdout; with --plot also draws both panels (needs matplotlib).
"""
import argparse
import csv
import sys

from packing_sat.encoder import clauses_per_color


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rmin", type=int, default=4)
    ap.add_argument("--rmax", type=int, default=14)
    ap.add_argument("--colors", default="4-10", help="range a-b of colors")
    ap.add_argument("--plot", help="write a PNG here")
    args = ap.parse_args()
    lo, hi = (int(x) for x in args.colors.split("-"))
    radii = range(args.rmin, args.rmax + 1)

    data = {}
    for variant in ("direct", "plus"):
        for r in radii:
            sizes = clauses_per_color(r, hi, variant)
            for t in range(lo, hi + 1):
                data[variant, r, t] = sizes[t]
    w = csv.writer(sys.stdout)
    w.writerow(["variant", "r", "t", "clauses"])
    for (variant, r, t), n in sorted(data.items()):
        w.writerow([variant, r, t, n])

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
        for ax, variant in zip(axes, ("direct", "plus")):
            for t in range(lo, hi + 1):
                ax.plot(list(radii), [data[variant, r, t] for r in radii], marker="o", ms=3, label=f"t={t}")
            ax.set_title(variant)
            ax.set_xlabel("radius r")
        axes[0].set_ylabel("clauses for color t")
        axes[1].legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)


if __name__ == "__main__":
    main()
