"""``kcut`` command-line entry point."""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import graphgen, mcstats, oracles, verify
from . import specfun as sf
from .cutsim import CutConfig, expected_total_given_tree
from .errors import DomainError, NumericalError, SamplingError
from .limitdist import LimitSamplerConfig, histogram, write_histogram_csv
from .tasks import BkTask, CompleteGraphTask, DirectTask, RandomTreeTask, RecordsTask

FAMILIES = ("path", "binary", "star", "complete", "curtain", "rrt", "gw")
ORACLES = ("dp", "perm", "path-mean", "xi2d", "lambda", "hyper-cot")


class UsageError(Exception):
    pass


def _positive(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1")
        return v
    return conv


def _seed(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be an integer") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _add_family_args(p):
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--n", type=_positive("n"), help="number of nodes (all families but binary)")
    p.add_argument("--m", type=int, help="height of the complete binary tree")
    p.add_argument("--ell", type=_positive("ell"), default=3, help="curtain: number of paths (default 3)")
    p.add_argument("--offspring", choices=sorted(graphgen.OFFSPRING), default="poisson1",
                   help="gw: offspring law (default poisson1)")


def _size(args) -> int:
    if args.family == "binary":
        if args.m is None or args.m < 0:
            raise UsageError("--family binary needs --m >= 0")
        return 2 ** (args.m + 1) - 1
    if args.n is None:
        raise UsageError(f"--family {args.family} needs --n")
    return args.n


def _fixed_tree(args) -> graphgen.RootedTree:
    if args.family == "path":
        return graphgen.path(args.n)
    if args.family == "star":
        return graphgen.star(args.n)
    if args.family == "binary":
        return graphgen.complete_binary(args.m)
    if args.family == "curtain":
        return graphgen.curtain(args.ell, args.n)
    raise UsageError(f"{args.family} is not a fixed tree")


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

class _TotalOfRandomTree:
    """Picklable wrapper: total cuts on a freshly drawn random tree."""

    def __init__(self, inner: RandomTreeTask):
        self.inner = inner

    def __call__(self, stream):
        return float(np.sum(self.inner(stream)))


def _simulation_task(args):
    k = args.k
    if args.family == "complete":
        return CompleteGraphTask(args.n, k)
    if args.family in ("rrt", "gw"):
        if args.family == "gw" and args.n > graphgen.GW_MAX_N:
            raise UsageError(f"gw limited to n <= {graphgen.GW_MAX_N}")
        return _TotalOfRandomTree(RandomTreeTask(args.family, args.n, k, args.offspring, exact=False))
    tree = _fixed_tree(args)
    if args.engine == "direct":
        return DirectTask(tree.as_graph(), k)
    return RecordsTask(tree, k)


def _prediction(args, n: int):
    """(label, value) pairs for whatever analytic prediction exists."""
    k = args.k
    out = []

    def attempt(label, fn):
        try:
            out.append((label, float(fn())))
        except (DomainError, NumericalError, ValueError, OverflowError):
            pass

    fam = args.family
    if fam == "path":
        attempt("exact", lambda: sum(oracles.exact_path_mean(n, k, r) for r in range(1, k + 1)))
        attempt("asymptotic", lambda: sum(sf.asym_mean_path(k, r, n) for r in range(1, k + 1)))
    elif fam in ("binary", "star", "curtain"):
        tree = _fixed_tree(args)
        attempt("exact", lambda: expected_total_given_tree(tree, CutConfig(k)))
        if fam == "binary":
            attempt("asymptotic", lambda: sum(sf.asym_mean_binary(k, r, args.m) for r in range(1, k + 1)))
        if fam == "curtain":
            attempt("asymptotic", lambda: args.ell * sf.eta(k, 1) * (n / args.ell) ** (1 - 1 / k))
    elif fam == "complete":
        attempt("asymptotic", lambda: sf.star_limit_mean(k) * n)
    elif fam == "rrt":
        attempt("asymptotic", lambda: sum(sf.asym_mean_rrt(k, r, n) for r in range(1, k + 1)))
    elif fam == "gw":
        sigma = graphgen.OFFSPRING_SIGMA[args.offspring]
        attempt("asymptotic", lambda: sum(sf.asym_mean_gw(k, r, sigma, n) for r in range(1, k + 1)))
    return out


def cmd_simulate(args) -> int:
    n = _size(args)
    if args.replicas < 2:
        raise UsageError("--replicas must be >= 2 to summarise")
    task = _simulation_task(args)
    out = Path(args.out)
    if out.exists() and not out.is_dir():
        raise UsageError(f"--out {out} exists and is not a directory")
    samples = mcstats.run_replicas(task, args.replicas, args.seed, workers=args.workers)
    summary = mcstats.summarize(samples)
    preds = _prediction(args, n)
    extra = {"family": args.family, "n": n, "k": args.k, "replicas": args.replicas, "seed": args.seed,
             "engine": args.engine if args.family not in ("complete", "rrt", "gw") else "records",
             "predictions": {label: v for label, v in preds},
             "ratios": {label: summary.mean / v for label, v in preds if v}}
    if args.family == "curtain":
        extra["ell"] = args.ell
    if args.family == "gw":
        extra["offspring"] = args.offspring
    out.mkdir(parents=True, exist_ok=True)
    mcstats.write_samples_csv(out / "samples.csv", samples)
    mcstats.write_summary_json(out / "summary.json", summary, **extra)
    print(f"family={args.family} n={n} k={args.k} replicas={args.replicas} seed={args.seed}")
    print(f"mean={summary.mean!r} variance={summary.variance!r} se_mean={summary.se_mean!r}")
    for label, v in preds:
        print(f"prediction[{label}]={v!r} observed/predicted={summary.mean / v:.6f}")
    return 0


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

def cmd_constants(args) -> int:
    k = args.k
    if k < 2:
        raise DomainError("eta, gamma, lambda and the moment constants need k >= 2")
    rows = []
    rs = [args.r] if args.r else list(range(1, k))
    for r in rs:
        rows.append((f"eta[{k},{r}]", sf.eta(k, r)))
    rows.append((f"gamma[{k}]", sf.gamma_const(k)))
    rows.append((f"var[{k}]", sf.var_const(k)))
    rows.append((f"lambda[{k}]", sf.lambda_const(k)))
    ells = [args.ell] if args.ell else [1, 2, 3]
    for ell in ells:
        rows.append((f"rho[{k},{ell}]", sf.rho(k, ell)))
    for ell in ells:
        rows.append((f"zeta[{k},{ell}]", sf.zeta(k, ell)))
    rows.append((f"star_limit_mean[{k}]", sf.star_limit_mean(k)))
    print("name\tvalue")
    for name, v in rows:
        print(f"{name}\t{v!r}")
    return 0


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def cmd_oracle(args) -> int:
    name = args.name
    settings = {"oracle": name}
    if name == "dp":
        if args.family in (None, "rrt", "gw"):
            raise UsageError("dp needs --family path|binary|star|complete|curtain")
        _size(args)
        g = graphgen.complete_graph(args.n) if args.family == "complete" else _fixed_tree(args)
        settings.update(family=args.family, n=g.n, k=args.k)
        value = oracles.dp_exact(g, args.k, exact=args.exact)
    elif name == "perm":
        settings.update(n=args.n)
        value = oracles.perm_records(_need(args, "n"), exact=args.exact)
    elif name == "path-mean":
        r = args.r or args.k
        settings.update(n=args.n, k=args.k, r=r)
        value = oracles.exact_path_mean(_need(args, "n"), args.k, r)
    elif name == "xi2d":
        settings.update(k=args.k, a=args.a, b=args.b)
        value = oracles.quad_xi_2d(args.k, args.a, args.b)
    elif name == "lambda":
        settings.update(k=args.k)
        value = oracles.quad_lambda(args.k)
    else:
        settings.update(k=args.k)
        value = oracles.quad_hyper_cot(args.k)
    print(" ".join(f"{key}={v}" for key, v in settings.items()))
    if isinstance(value, Fraction):
        print(f"value={value}")
        print(f"float={float(value)!r}")
    else:
        print(f"value={value!r}")
    return 0


def _need(args, attr):
    v = getattr(args, attr)
    if v is None:
        raise UsageError(f"--{attr} is required for this oracle")
    return v


# ---------------------------------------------------------------------------
# limit-sample
# ---------------------------------------------------------------------------

def cmd_limit_sample(args) -> int:
    cfg = LimitSamplerConfig(args.k, term_tol=args.term_tol, patience=args.patience, p_cap=args.p_cap)
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    if args.bins < 1:
        raise UsageError("--bins must be >= 1")
    out = Path(args.out)
    if out.exists() and not out.is_dir():
        raise UsageError(f"--out {out} exists and is not a directory")
    x = mcstats.run_replicas(BkTask(cfg), args.samples, args.seed, workers=args.workers)
    edges, counts, overlay = histogram(x, args.bins)
    moments = {}
    for p in (1, 2, 3):
        est = mcstats.moment(x, p)
        se = float(np.std(x ** p, ddof=1) / math.sqrt(x.size))
        moments[str(p)] = {"empirical": est, "se": se, "lower": sf.eta(args.k, 1) ** p,
                           "upper": sf.rho(args.k, p)}
    payload = {"k": args.k, "samples": args.samples, "seed": args.seed, "bins": args.bins,
               "term_tol": cfg.term_tol, "patience": cfg.patience, "p_cap": cfg.p_cap,
               "eta": sf.eta(args.k, 1), "gamma_const": sf.gamma_const(args.k),
               "summary": mcstats.summarize(x).to_json(), "moments": moments}
    out.mkdir(parents=True, exist_ok=True)
    mcstats.write_samples_csv(out / "samples.csv", x)
    write_histogram_csv(out / "histogram.csv", edges, counts, overlay)
    with open(out / "moments.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"k={args.k} samples={args.samples} seed={args.seed}")
    for p, row in moments.items():
        print(f"E[B^{p}]={row['empirical']!r} se={row['se']:.3g} bracket=[{row['lower']!r}, {row['upper']!r}]")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    report = verify.run_suite(args.suite, args.seed, workers=args.workers, log=print)
    if args.out:
        verify.write_report(args.out, report)
    print(f"suite {args.suite}: {'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# dump-tree
# ---------------------------------------------------------------------------

def cmd_dump_tree(args) -> int:
    _size(args)
    if args.family == "complete":
        raise UsageError("dump-tree prints trees; complete graphs are not trees")
    if args.family in ("rrt", "gw"):
        if args.seed is None:
            raise UsageError(f"--family {args.family} needs --seed")
        stream = mcstats.derive_stream(args.seed, 0)
        tree = RandomTreeTask(args.family, args.n, 1, args.offspring, exact=False).tree(stream)
    else:
        tree = _fixed_tree(args)
    text = tree.dump()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcut", description="k-cut model: simulation, constants, oracles")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo totals for a graph family")
    _add_family_args(p)
    p.add_argument("--k", type=_positive("k"), required=True)
    p.add_argument("--replicas", type=_positive("replicas"), required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--out", required=True, help="output directory (samples.csv, summary.json)")
    p.add_argument("--engine", choices=("records", "direct"), default="records",
                   help="fixed trees: record engine or literal cutting (default records)")
    p.add_argument("--workers", type=_positive("workers"), default=mcstats.default_workers())
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("constants", help="table of limit constants for one k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=_positive("r"))
    p.add_argument("--ell", type=_positive("ell"))
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("oracle", help="evaluate one exact or quadrature oracle")
    p.add_argument("--name", required=True, choices=ORACLES)
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=_positive("n"))
    p.add_argument("--m", type=int)
    p.add_argument("--ell", type=_positive("ell"), default=3)
    p.add_argument("--offspring", choices=sorted(graphgen.OFFSPRING), default="poisson1")
    p.add_argument("--k", type=_positive("k"), default=2)
    p.add_argument("--r", type=_positive("r"))
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--exact", action="store_true", help="dp/perm: print the exact fraction")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("limit-sample", help="draws of the path limit law B_k with histogram")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--bins", type=int, default=60)
    p.add_argument("--out", required=True, help="output directory (samples.csv, histogram.csv, moments.json)")
    p.add_argument("--term-tol", type=float, default=1e-9)
    p.add_argument("--patience", type=_positive("patience"), default=8)
    p.add_argument("--p-cap", type=_positive("p-cap"), default=400)
    p.add_argument("--workers", type=_positive("workers"), default=mcstats.default_workers())
    p.set_defaults(func=cmd_limit_sample)

    p = sub.add_parser("verify", help="run an acceptance suite")
    p.add_argument("--suite", required=True, choices=sorted(verify.SUITES))
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--workers", type=_positive("workers"), default=mcstats.default_workers())
    p.add_argument("--out", help="write the measured values as JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dump-tree", help="print a tree as 'index parent depth' lines")
    _add_family_args(p)
    p.add_argument("--seed", type=_seed, help="required for rrt and gw")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dump_tree)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"kcut {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (SamplingError, NumericalError, mcstats.ReplicaError) as exc:
        print(f"kcut {args.command}: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
