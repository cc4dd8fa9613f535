#!/usr/bin/env python3
"""Plots the CSV written by `phecp papd` (one line per omega_m/kappa ratio).

usage: plot_papd.py papd.csv [out.png] [--dimensionless]
"""

import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt


def main():
    args = [a for a in sys.argv[1:] if not a.startswith("--")]
    column = "papd_dimensionless" if "--dimensionless" in sys.argv else "papd_per_s"
    curves = defaultdict(lambda: ([], []))
    with open(args[0], newline="") as f:
        for row in csv.DictReader(f):
            xs, ys = curves[float(row["ratio"])]
            xs.append(float(row["t_p"]))
            ys.append(float(row[column]))
    for ratio, (xs, ys) in sorted(curves.items()):
        plt.plot(xs, ys, label=f"omega_m = {ratio:g} kappa")
    plt.xlabel("t_p = g t / 2 pi")
    plt.ylabel("PAPD (1/kappa units)" if column == "papd_dimensionless" else "PAPD (1/s)")
    plt.legend()
    if len(args) > 1:
        plt.savefig(args[1], dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
