"""Optimal squeezing and single-photon probability versus the number of bins.

    python3 scripts/squeezing_scan.py --eta-i 0.3 --eta-s 0.85 > scan.csv
"""

import argparse
import csv
import sys

import numpy as np

from freqmux.design import optimize_squeezing, spatial_tree_loss


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta-i", type=float, default=0.3)
    ap.add_argument("--eta-s", type=float, default=0.85)
    ap.add_argument("--max-bins", type=int, default=5000)
    ap.add_argument("--switch-loss-db", type=float, default=0.5)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n_bins", "lambda_star", "p1_star", "spatial_tree_loss_db"])
    for n in np.unique(np.geomspace(1, args.max_bins, 40).round().astype(int)):
        opt = optimize_squeezing(args.eta_i, args.eta_s, int(n))
        loss = spatial_tree_loss(int(n), args.switch_loss_db)
        w.writerow([n, f"{opt.lambda_star:.6f}", f"{opt.p1_star:.6f}", f"{loss:g}"])


if __name__ == "__main__":
    main()
