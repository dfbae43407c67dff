"""Convergence of E[K(P_n)] / n^{1-1/k} towards eta_{k,1}.

Prints exact (quadrature) means for n = 2^4 .. 2^max_log2 and, optionally,
Monte Carlo means from the record engine at the same sizes.

    python3 scripts/path_scaling.py --k 2 --max-log2 18 --replicas 500 --seed 3
"""
import argparse

from kcut import graphgen, mcstats, oracles
from kcut import specfun as sf
from kcut.tasks import RecordsTask


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--max-log2", type=int, default=16)
    ap.add_argument("--replicas", type=int, default=0, help="0 skips Monte Carlo")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    k = args.k
    eta = sf.eta(k, 1)
    print(f"# k={k} eta={eta!r}")
    print("n\texact_total/scale\texact_K1/scale\tmc_mean/scale\tmc_se/scale")
    for e in range(4, args.max_log2 + 1):
        n = 2 ** e
        scale = n ** (1 - 1 / k)
        per_r = [oracles.exact_path_mean(n, k, r) for r in range(1, k + 1)]
        row = [str(n), f"{sum(per_r) / scale:.6f}", f"{per_r[0] / scale:.6f}"]
        if args.replicas:
            x = mcstats.run_replicas(RecordsTask(graphgen.path(n), k), args.replicas, args.seed + e)
            s = mcstats.summarize(x)
            row += [f"{s.mean / scale:.6f}", f"{s.se_mean / scale:.6f}"]
        print("\t".join(row))


if __name__ == "__main__":
    main()
