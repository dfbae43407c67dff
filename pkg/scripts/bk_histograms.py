"""Histogram data for the limit law B_k, one directory per k.

    python3 scripts/bk_histograms.py --ks 2 3 4 5 --samples 100000 --seed 1 --out results/bk
"""
import argparse
from pathlib import Path

from kcut.cli import main as kcut_main


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ks", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--bins", type=int, default=80)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out", type=Path, default=Path("results/bk"))
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    for k in args.ks:
        kcut_main(["limit-sample", "--k", str(k), "--samples", str(args.samples), "--bins", str(args.bins),
                   "--seed", str(args.seed), "--out", str(args.out / f"k{k}"), "--workers", str(args.workers)])


if __name__ == "__main__":
    main()
