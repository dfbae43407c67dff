"""Exact conditional means on tree families against their leading-order predictions.

For binary trees the conditional mean given the tree is the mean; for random
recursive trees it is averaged over sampled trees.

    python3 scripts/family_ratios.py --k 2 --seed 5
"""
import argparse

import numpy as np

from kcut import graphgen, mcstats
from kcut import specfun as sf
from kcut.cutsim import CutConfig, expected_total_given_tree


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--trees", type=int, default=50)
    ap.add_argument("--seed", type=int, required=True)
    args = ap.parse_args()
    k = args.k
    cfg = CutConfig(k)
    print("family\tsize\texact_mean\tprediction\tratio")
    for m in range(6, 19, 2):
        t = graphgen.complete_binary(m)
        ex = expected_total_given_tree(t, cfg)
        pred = sum(sf.asym_mean_binary(k, r, m) for r in range(1, k + 1))
        print(f"binary\tm={m}\t{ex:.2f}\t{pred:.2f}\t{ex / pred:.4f}")
    for e in range(2, 7):
        n = 10 ** e
        means = [expected_total_given_tree(graphgen.random_recursive(n, mcstats.derive_stream(args.seed, i)), cfg)
                 for i in range(args.trees)]
        pred = sum(sf.asym_mean_rrt(k, r, n) for r in range(1, k + 1))
        print(f"rrt\tn={n}\t{np.mean(means):.2f}\t{pred:.2f}\t{np.mean(means) / pred:.4f}")


if __name__ == "__main__":
    main()
